//! The θ-power family `p_k = θ^k` and the polynomial
//! `f(θ) = (1+θ)^{2n-2} − 2^{n-1}θ²(1+θ²)^{n-2} − 2^{2n-3}θ^{n-2}`
//! whose roots put the family into the independence set
//! (`ψ(θ, …, θ^n) = θ² f(θ) / 2^{2n-2}`).

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{GstError, Result};
use crate::model::ProbVector;
use crate::poly::{simplest_rational_between, sturm_count, Poly};
use crate::scalar::{binom, pow2, rational_to_f64, Rational, Scalar};

/// Initial grid spacing is `2^-GRID_EXPONENT`.
pub const GRID_EXPONENT: u32 = 10;

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(GstError::Invalid(format!("f(θ) needs n >= 3, got {n}")));
    }
    Ok(())
}

/// Evaluates `f(θ)` directly from its definition.
pub fn f_eval<T: Scalar>(n: usize, theta: &T) -> Result<T> {
    check_n(n)?;
    let n32 = n as u32;
    let one = T::one();
    let sq = theta.clone() * theta.clone();
    let a = (one.clone() + theta.clone()).pow_u(2 * n32 - 2);
    let b = pow2::<T>(n32 - 1) * sq.clone() * (one + sq).pow_u(n32 - 2);
    let c = pow2::<T>(2 * n32 - 3) * theta.pow_u(n32 - 2);
    Ok(a - b - c)
}

/// `f` as an exact polynomial, expanded binomially.
pub fn f_poly(n: usize) -> Result<Poly> {
    check_n(n)?;
    let n64 = n as i64;
    let mut coeffs = vec![Rational::zero(); 2 * n - 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c += Rational::from_integer(binom(2 * n64 - 2, k as i64));
    }
    let two_n1: Rational = pow2((n - 1) as u32);
    for j in 0..=n - 2 {
        coeffs[2 + 2 * j] -= &two_n1 * Rational::from_integer(binom(n64 - 2, j as i64));
    }
    coeffs[n - 2] -= pow2::<Rational>((2 * n - 3) as u32);
    Ok(Poly::new(coeffs))
}

/// `(θ, θ², …, θ^n)` for `θ ∈ (0, 1)`.
pub fn theta_point<T: Scalar>(n: usize, theta: &T) -> Result<ProbVector<T>> {
    if !(*theta > T::zero() && *theta < T::one()) {
        return Err(GstError::Invalid(format!("θ = {theta} must lie in (0, 1)")));
    }
    ProbVector::new((1..=n as u32).map(|k| theta.pow_u(k)).collect())
}

/// One isolated root of `f` in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRoot {
    #[serde(serialize_with = "ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub hi: Rational,
    /// Set when the root was identified as a rational number.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<Rational>,
    pub value: f64,
}

fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_repr())
}

fn ser_opt_rational<S: serde::Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_repr()),
        None => s.serialize_none(),
    }
}

impl ThetaRoot {
    fn exact(r: Rational) -> Self {
        Self { lo: r.clone(), hi: r.clone(), value: rational_to_f64(&r), exact: Some(r) }
    }
}

fn sign(v: &Rational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Roots of `g` (square-free) strictly inside `(a, b)` with `g(a), g(b) ≠ 0`
/// are split until each piece holds exactly one.
fn isolate(g: &Poly, seq: &[Poly], a: Rational, b: Rational, out: &mut Vec<ThetaRoot>, brackets: &mut Vec<(Rational, Rational)>) {
    match sturm_count(seq, &a, &b) {
        0 => {}
        1 => brackets.push((a, b)),
        _ => {
            let mid = (&a + &b) / Rational::from_integer(2.into());
            if g.eval(&mid).is_zero() {
                out.push(ThetaRoot::exact(mid.clone()));
            }
            isolate(g, seq, a, mid.clone(), out, brackets);
            isolate(g, seq, mid, b, out, brackets);
        }
    }
}

/// All roots of `f` in the open interval `(0, 1)`, each bracketed to width
/// at most `tol` and reported exactly when a rational root is recognised.
///
/// Signs are taken on a dyadic grid of spacing `2^-10`; a Sturm count of
/// the square-free part certifies that no root was missed, and any cell
/// holding more roots than its sign changes show is subdivided.
pub fn theta_roots(n: usize, tol: f64) -> Result<Vec<ThetaRoot>> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(GstError::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let tol = Ratio::from_float(tol).expect("finite");
    let f = f_poly(n)?;
    let g = f.square_free();
    let seq = g.sturm_sequence();
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut expected = sturm_count(&seq, &zero, &one);
    if g.eval(&one).is_zero() {
        expected -= 1;
    }

    let cells = 1usize << GRID_EXPONENT;
    let step = Rational::new(1.into(), (cells as i64).into());
    let grid: Vec<Rational> = (0..=cells).map(|k| &step * Rational::from_integer((k as i64).into())).collect();
    let signs: Vec<i8> = grid.iter().map(|x| sign(&g.eval(x))).collect();

    let mut roots = Vec::new();
    let mut brackets = Vec::new();
    for k in 1..cells {
        if signs[k] == 0 {
            roots.push(ThetaRoot::exact(grid[k].clone()));
        }
    }
    for k in 0..cells {
        if signs[k] * signs[k + 1] < 0 {
            brackets.push((grid[k].clone(), grid[k + 1].clone()));
        }
    }
    if roots.len() + brackets.len() < expected {
        // a cell hides an even number of sign changes
        roots.clear();
        brackets.clear();
        for k in 0..cells {
            if k > 0 && signs[k] == 0 {
                roots.push(ThetaRoot::exact(grid[k].clone()));
            }
            isolate(&g, &seq, grid[k].clone(), grid[k + 1].clone(), &mut roots, &mut brackets);
        }
        // isolate counts (a, b]; drop the right endpoint roots already listed
        brackets.retain(|(a, b)| {
            let inner = sturm_count(&seq, a, b) - usize::from(g.eval(b).is_zero());
            inner == 1
        });
    }
    if roots.len() + brackets.len() != expected {
        return Err(GstError::Numerical(format!(
            "root isolation found {} roots of f for n = {n}, Sturm count says {expected}",
            roots.len() + brackets.len()
        )));
    }

    let two = Rational::from_integer(2.into());
    for (mut lo, mut hi) in brackets {
        // the right end is never a root; the left one may be in the fallback
        let s_hi = sign(&g.eval(&hi));
        let mut exact = None;
        while &hi - &lo > tol {
            let mid = (&lo + &hi) / &two;
            match sign(&g.eval(&mid)) {
                0 => {
                    exact = Some(mid);
                    break;
                }
                s if s == s_hi => hi = mid,
                _ => lo = mid,
            }
        }
        if exact.is_none() {
            let guess = simplest_rational_between(&lo, &hi);
            if g.eval(&guess).is_zero() {
                exact = Some(guess);
            }
        }
        roots.push(match exact {
            Some(r) => ThetaRoot::exact(r),
            None => {
                let value = rational_to_f64(&((&lo + &hi) / &two));
                ThetaRoot { lo, hi, exact: None, value }
            }
        });
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(roots)
}
