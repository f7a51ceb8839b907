//! Points with one quadratic-irrational parameter: `p = base + α·dir`,
//! where `α` is the unique root of `c₂α² + c₁α + c₀` inside a rational
//! bracket. The boundary family `(1, 0, …, 0, 1/(√N − 1))` lives here.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::{equivalent, EquivWitness, PointFile};
use crate::error::{GstError, Result};
use crate::poly::rational_sqrt;
use crate::quadform::{cross_term, psi};
use crate::scalar::{pow2, rational_to_f64, Rational, Scalar};

/// `c₂α² + c₁α + c₀ = 0` with exactly one root in `(lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCertificate {
    pub c0: Rational,
    pub c1: Rational,
    pub c2: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

impl QuadraticCertificate {
    fn eval(&self, x: &Rational) -> Rational {
        (&self.c2 * x + &self.c1) * x + &self.c0
    }

    /// Bracket sign change, `c₂ ≠ 0`, and `[lo, hi] ⊂ [0, 1]`.
    pub fn validates(&self) -> bool {
        let (a, b) = (self.eval(&self.lo), self.eval(&self.hi));
        !self.c2.is_zero()
            && self.lo < self.hi
            && !self.lo.is_negative()
            && self.hi <= Rational::one()
            && (a.is_positive() && b.is_negative() || a.is_negative() && b.is_positive())
    }

    /// The root itself when the discriminant is a rational square.
    pub fn rational_root(&self) -> Option<Rational> {
        let disc = &self.c1 * &self.c1 - Rational::from_integer(4.into()) * &self.c2 * &self.c0;
        let s = rational_sqrt(&disc)?;
        let two_a = Rational::from_integer(2.into()) * &self.c2;
        [(-&self.c1 + &s) / &two_a, (-&self.c1 - &s) / &two_a]
            .into_iter()
            .find(|r| *r > self.lo && *r < self.hi)
    }

    /// Floating-point root via bisection of the bracket.
    pub fn approx(&self) -> f64 {
        if let Some(r) = self.rational_root() {
            return rational_to_f64(&r);
        }
        let f = |x: f64| {
            (rational_to_f64(&self.c2) * x + rational_to_f64(&self.c1)) * x + rational_to_f64(&self.c0)
        };
        let (mut lo, mut hi) = (rational_to_f64(&self.lo), rational_to_f64(&self.hi));
        let s_lo = f(lo).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `r₀ + r₁α + r₂α²` reduced to `(s₀, s₁)` with value `s₀ + s₁α`.
    fn reduce(&self, r0: Rational, r1: Rational, r2: Rational) -> (Rational, Rational) {
        // α² = −(c₁α + c₀)/c₂
        let k = &r2 / &self.c2;
        (r0 - &k * &self.c0, r1 - k * &self.c1)
    }

    /// Exact sign of `s₀ + s₁α`.
    fn sign_linear(&self, s0: &Rational, s1: &Rational) -> i8 {
        let sgn = |v: &Rational| -> i8 {
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        };
        if s1.is_zero() {
            return sgn(s0);
        }
        if let Some(r) = self.rational_root() {
            return sgn(&(s0 + s1 * r));
        }
        // irrational α: compare against the rational zero of the line
        let z = -(s0 / s1);
        let alpha_above_z = if z <= self.lo {
            true
        } else if z >= self.hi {
            false
        } else {
            let (at_z, at_lo) = (self.eval(&z), self.eval(&self.lo));
            at_z.is_positive() == at_lo.is_positive()
        };
        sgn(s1) * if alpha_above_z { 1 } else { -1 }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "polynomial": [self.c0.to_repr(), self.c1.to_repr(), self.c2.to_repr()],
            "bracket": [self.lo.to_repr(), self.hi.to_repr()],
            "rational_root": self.rational_root().map(|r| r.to_repr()),
            "valid": self.validates(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicPoint {
    pub base: Vec<Rational>,
    pub dir: Vec<Rational>,
    pub alpha: QuadraticCertificate,
}

/// Exact verdicts for an [`AlgebraicPoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicVerdict {
    pub certificate_valid: bool,
    pub in_box: bool,
    pub psi_zero: bool,
    pub in_inf: bool,
    pub influence_witness: Option<usize>,
    pub in_gst: bool,
    pub psi_float: f64,
}

impl AlgebraicPoint {
    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let a = self.alpha.approx();
        self.base
            .iter()
            .zip(&self.dir)
            .map(|(b, d)| rational_to_f64(b) + a * rational_to_f64(d))
            .collect()
    }

    /// `1 − p`, keeping the same `α`.
    pub fn involution(&self) -> Self {
        Self {
            base: self.base.iter().map(|b| Rational::one() - b).collect(),
            dir: self.dir.iter().map(|d| -d).collect(),
            alpha: self.alpha.clone(),
        }
    }

    /// `ψ = ψ(base) + α·CT(base, dir) + α²·ψ(dir)`, reduced modulo the
    /// minimal quadratic of `α`.
    pub fn psi_reduced(&self) -> Result<(Rational, Rational)> {
        let ct = cross_term(&self.base, &self.dir)?;
        Ok(self.alpha.reduce(psi(&self.base), ct, psi(&self.dir)))
    }

    pub fn verify(&self) -> Result<AlgebraicVerdict> {
        let n = self.n();
        if self.dir.len() != n {
            return Err(GstError::DimensionMismatch { expected: n, got: self.dir.len() });
        }
        let cert = &self.alpha;
        let certificate_valid = cert.validates();
        let (s0, s1) = self.psi_reduced()?;
        let psi_zero = certificate_valid && cert.sign_linear(&s0, &s1) == 0;
        let in_box = certificate_valid
            && self.base.iter().zip(&self.dir).all(|(b, d)| {
                cert.sign_linear(b, d) >= 0 && cert.sign_linear(&(Rational::one() - b), &-d) >= 0
            });
        let influence_witness = (0..n / 2)
            .find(|&s| {
                let t = n - 1 - s;
                cert.sign_linear(&(&self.base[s] - &self.base[t]), &(&self.dir[s] - &self.dir[t])) != 0
            })
            .map(|s| s + 1);
        let in_inf = certificate_valid && in_box && influence_witness.is_some();
        Ok(AlgebraicVerdict {
            certificate_valid,
            in_box,
            psi_zero,
            in_inf,
            influence_witness,
            in_gst: in_box && psi_zero && in_inf,
            psi_float: psi(&self.to_f64()),
        })
    }

    /// `self = a·other + b·1`, decided exactly.
    pub fn equivalent(&self, other: &Self) -> Result<Option<EquivWitness<Rational>>> {
        if self.n() != other.n() {
            return Err(GstError::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        if self.alpha != other.alpha {
            return Err(GstError::NotApplicable("points use different algebraic parameters".into()));
        }
        if let Some(r) = self.alpha.rational_root() {
            let at = |p: &Self| -> Vec<Rational> {
                p.base.iter().zip(&p.dir).map(|(b, d)| b + d * &r).collect()
            };
            return equivalent(&at(self), &at(other), 0.0);
        }
        // 1 and α are linearly independent over the rationals
        let Some(j) = other.dir.iter().position(|d| !d.is_zero()) else {
            return if self.dir.iter().all(Zero::is_zero) {
                equivalent(&self.base, &other.base, 0.0)
            } else {
                Ok(None)
            };
        };
        let a = &self.dir[j] / &other.dir[j];
        if a.is_zero() || self.dir.iter().zip(&other.dir).any(|(s, o)| *s != &a * o) {
            return Ok(None);
        }
        let b = &self.base[0] - &a * &other.base[0];
        let ok = self.base.iter().zip(&other.base).all(|(s, o)| *s == &a * o + &b);
        Ok(ok.then_some(EquivWitness { a, b }))
    }

    /// Point file with float coordinates and the exact certificate.
    pub fn to_point_file(&self) -> PointFile {
        let mut file = PointFile::from_vector(&self.to_f64());
        file.certificates.insert("alpha".into(), self.alpha.to_json());
        file.certificates.insert(
            "base".into(),
            Value::Array(self.base.iter().map(|v| Value::String(v.to_repr())).collect()),
        );
        file.certificates.insert(
            "dir".into(),
            Value::Array(self.dir.iter().map(|v| Value::String(v.to_repr())).collect()),
        );
        file
    }
}

/// `(1, 0, …, 0, α)` with `(1 − N)α² + 2α + 1 = 0`, `N = 2^{n-1}`, so
/// `α = 1/(√N − 1)`.
pub fn boundary_point(n: usize) -> Result<AlgebraicPoint> {
    match n {
        0..=2 => return Err(GstError::Invalid(format!("boundary points need n >= 4, got {n}"))),
        3 => {
            return Err(GstError::NotApplicable(
                "for n = 3 the construction gives (1, 0, 1), which has no influence".into(),
            ))
        }
        _ => {}
    }
    let big_n: Rational = pow2((n - 1) as u32);
    let mut alpha = QuadraticCertificate {
        c0: Rational::one(),
        c1: Rational::from_integer(2.into()),
        c2: Rational::one() - big_n,
        lo: Rational::zero(),
        hi: Rational::one(),
    };
    // narrow the bracket to 2^-40 so the float value is well pinned
    let two = Rational::from_integer(2.into());
    let s_hi = alpha.eval(&alpha.hi).is_positive();
    for _ in 0..40 {
        let mid = (&alpha.lo + &alpha.hi) / &two;
        let v = alpha.eval(&mid);
        if v.is_zero() {
            let w = Rational::new(1.into(), (1u64 << 50).into());
            alpha.lo = &mid - &w;
            alpha.hi = mid + w;
            break;
        }
        if v.is_positive() == s_hi {
            alpha.hi = mid;
        } else {
            alpha.lo = mid;
        }
    }
    let mut base = vec![Rational::zero(); n];
    base[0] = Rational::one();
    let mut dir = vec![Rational::zero(); n];
    dir[n - 1] = Rational::one();
    Ok(AlgebraicPoint { base, dir, alpha })
}
