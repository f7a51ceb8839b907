//! Inertia of `H_n` through an exact LDLᵀ factorization of a perturbed matrix.
//!
//! `H_n` is singular, so we factor `A = H_n + εB` where `B` is the
//! anti-diagonal exchange matrix (`B_ij = 1` iff `i + j = n + 1`). For ε
//! below the smallest nonzero root of the leading-minor polynomials every
//! pivot is nonzero and Sylvester's law gives the inertia of `A` from the
//! signs of `D`. As ε → 0 the kernel eigenvalue of `H_n` moves to
//! `ε·(1ᵀB1)/n = ε > 0` at first order, so `H_n` has one positive
//! eigenvalue fewer than `A` and exactly one zero.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{eigen_sym, hessian, rank_h};
use crate::error::{GstError, Result};
use crate::linalg::{leading_minors, Matrix};
use crate::scalar::{binom, Rational, Scalar};

/// Eigenvalue sign counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn from_signs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut out = Inertia { n_pos: 0, n_neg: 0, n_zero: 0 };
        for v in values {
            if v.is_positive() {
                out.n_pos += 1;
            } else if v.is_negative() {
                out.n_neg += 1;
            } else {
                out.n_zero += 1;
            }
        }
        out
    }

    pub fn from_floats(values: &[f64], zero_tol: f64) -> Self {
        let mut out = Inertia { n_pos: 0, n_neg: 0, n_zero: 0 };
        for &v in values {
            if v.abs() <= zero_tol {
                out.n_zero += 1;
            } else if v > 0.0 {
                out.n_pos += 1;
            } else {
                out.n_neg += 1;
            }
        }
        out
    }

    pub fn total(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }
}

/// Exact `A = L·diag(D)·Lᵀ` for a given ε.
#[derive(Debug, Clone)]
pub struct LdlTrace {
    pub epsilon: Rational,
    pub d: Vec<Rational>,
    pub l: Matrix<Rational>,
}

impl LdlTrace {
    /// Rebuilds `L·diag(D)·Lᵀ`.
    pub fn reconstruct(&self) -> Matrix<Rational> {
        let n = self.d.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(Rational::zero(), |acc, k| {
                acc + self.l[(i, k)].clone() * self.d[k].clone() * self.l[(j, k)].clone()
            })
        })
    }
}

/// Anti-diagonal exchange matrix `B`.
pub fn perturbation(n: usize) -> Matrix<Rational> {
    Matrix::from_fn(n, n, |i, j| if i + j + 1 == n { Rational::one() } else { Rational::zero() })
}

fn perturbed(n: usize, eps: &Rational) -> Result<Matrix<Rational>> {
    let h = hessian::<Rational>(n)?.h;
    h.add(&perturbation(n).scale(eps))
}

/// Unpivoted LDLᵀ by the textbook recursions
/// `D_j = A_jj − Σ_{k<j} L_jk² D_k` and
/// `L_ij = (A_ij − Σ_{k<j} L_ik L_jk D_k) / D_j`.
pub fn ldl_exact(a: &Matrix<Rational>, epsilon: Rational) -> Result<LdlTrace> {
    if !a.is_symmetric() {
        return Err(GstError::Invalid("LDLᵀ needs a symmetric matrix".into()));
    }
    let n = a.rows();
    let mut l = Matrix::<Rational>::identity(n);
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let dj = (0..j).fold(a[(j, j)].clone(), |acc, k| {
            acc - l[(j, k)].clone() * l[(j, k)].clone() * d[k].clone()
        });
        if dj.is_zero() {
            return Err(GstError::Numerical(format!(
                "zero pivot D_{} at ε = {}",
                j + 1,
                epsilon.to_repr()
            )));
        }
        for i in j + 1..n {
            let s = (0..j).fold(a[(i, j)].clone(), |acc, k| {
                acc - l[(i, k)].clone() * l[(j, k)].clone() * d[k].clone()
            });
            l[(i, j)] = s / dj.clone();
        }
        d.push(dj);
    }
    Ok(LdlTrace { epsilon, d, l })
}

const EPS_RETRIES: u32 = 32;

/// Picks ε = 2^{-j}, j ∈ {4, 8, 12, …}, such that every leading principal
/// minor of `H_n + εB` is nonzero (checked exactly by Bareiss elimination).
pub fn epsilon_select(n: usize) -> Result<Rational> {
    if n < 3 {
        return Err(GstError::Invalid(format!("n >= 3 required, got {n}")));
    }
    for attempt in 1..=EPS_RETRIES {
        let eps = Rational::new(BigInt::one(), BigInt::one() << (4 * attempt) as usize);
        let minors = leading_minors(&perturbed(n, &eps)?);
        if minors.iter().all(|m| !m.is_zero()) {
            return Ok(eps);
        }
    }
    Err(GstError::Numerical(format!("no admissible ε found for n = {n}")))
}

/// Odd `n >= 5`: `D_{⌊n/2⌋+1} = (2/N) C(n-2,⌊n/2⌋) · 2/(⌊n/2⌋-1) + ε`.
pub fn middle_pivot_odd(n: usize, eps: &Rational) -> Option<Rational> {
    let h = (n / 2) as i64;
    if n.is_multiple_of(2) || h < 2 {
        return None;
    }
    let big_n = Rational::from_integer(BigInt::one() << (n - 1));
    let c = Rational::from_integer(binom(n as i64 - 2, h));
    Some(Rational::from_integer(2.into()) / big_n * c * Rational::new(2.into(), (h - 1).into()) + eps.clone())
}

/// Even `n >= 6` with `t = n/2`, using the narrower ε² coefficient
/// `N / (2 C(n-2,t-2))`. Does not match the recursion; see [`middle_pivot_even`].
pub fn middle_pivot_even_narrow(n: usize, eps: &Rational) -> Option<Rational> {
    let (constant, big_n, t) = even_constant(n)?;
    let denom = Rational::from_integer(binom(n as i64 - 2, t - 2) * 2);
    Some(constant + eps.clone() * eps.clone() * big_n / denom)
}

/// Even `n >= 6`: the exact value of the recursion. The pivot `D_t` at
/// `t = n/2` carries both diagonal contributions of `X`, so the ε²
/// coefficient is `N / (2 C(n-1, t-1))`.
pub fn middle_pivot_even(n: usize, eps: &Rational) -> Option<Rational> {
    let (constant, big_n, t) = even_constant(n)?;
    let denom = Rational::from_integer(binom(n as i64 - 1, t - 1) * 2);
    Some(constant + eps.clone() * eps.clone() * big_n / denom)
}

fn even_constant(n: usize) -> Option<(Rational, Rational, i64)> {
    let t = (n / 2) as i64;
    if !n.is_multiple_of(2) || t < 3 {
        return None;
    }
    let big_n = Rational::from_integer(BigInt::one() << (n - 1));
    let c = Rational::from_integer(binom(n as i64 - 2, t - 1));
    let frac = Rational::new((n as i64 - 1).into(), (t * (t - 2)).into());
    Some((Rational::from_integer(2.into()) / big_n.clone() * c * frac, big_n, t))
}

/// Factors `H_n + εB` at an admissible ε, returns the inertia of `A` and
/// the trace, after checking the pivot sign pattern `D_1 > 0`,
/// `D_i < 0` for `2 <= i <= ⌊n/2⌋`, and (for `n >= 5`) the closed form
/// and positivity of `D_{⌊n/2⌋+1}`.
pub fn inertia_ldl(n: usize) -> Result<(Inertia, LdlTrace)> {
    let eps = epsilon_select(n)?;
    inertia_ldl_at(n, eps)
}

fn inertia_ldl_at(n: usize, eps: Rational) -> Result<(Inertia, LdlTrace)> {
    let trace = ldl_exact(&perturbed(n, &eps)?, eps)?;
    check_pivot_pattern(n, &trace)?;
    Ok((Inertia::from_signs(&trace.d), trace))
}

fn check_pivot_pattern(n: usize, trace: &LdlTrace) -> Result<()> {
    let d = &trace.d;
    let half = n / 2;
    if !d[0].is_positive() {
        return Err(GstError::Numerical("D_1 is not positive".into()));
    }
    let big_n = Rational::from_integer(BigInt::one() << (n - 1));
    for i in 2..=half {
        let expected =
            -Rational::from_integer(2.into()) / big_n.clone() * Rational::from_integer(binom(n as i64 - 2, i as i64 - 2))
                - if 2 * i == n {
                    Rational::from_integer(2.into()) / big_n.clone()
                        * Rational::from_integer(binom(n as i64 - 2, i as i64 - 1))
                } else {
                    Rational::zero()
                };
        if d[i - 1] != expected || !d[i - 1].is_negative() {
            return Err(GstError::Numerical(format!("D_{i} = {} breaks the pivot pattern", d[i - 1])));
        }
    }
    if n >= 5 {
        let t = half + 1;
        let closed = if n % 2 == 1 {
            middle_pivot_odd(n, &trace.epsilon)
        } else {
            middle_pivot_even(n, &trace.epsilon)
        };
        if closed.as_ref() != Some(&d[t - 1]) || !d[t - 1].is_positive() {
            return Err(GstError::Numerical(format!(
                "D_{t} = {} does not match its closed form",
                d[t - 1].to_repr()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct InertiaReport {
    pub n: usize,
    /// Inertia of `H_n`.
    pub inertia: Inertia,
    /// Inertia of `H_n + εB` at the final ε.
    pub perturbed: Inertia,
    pub epsilon: String,
    /// Number of ε halvings performed before the signs settled.
    pub halvings: u32,
    /// Inertia from the Jacobi eigenvalues of `H_n`.
    pub eigen: Inertia,
    pub eigenvalues: Vec<f64>,
}

const MAX_HALVINGS: u32 = 64;

/// Inertia of `H_n` itself. The LDLᵀ route shrinks ε until the pivot signs
/// agree across two successive halvings; the Jacobi route counts eigenvalue
/// signs with zero band `1e-10·max|H_ij|`. The two must agree.
pub fn inertia_of_h(n: usize) -> Result<InertiaReport> {
    let mut eps = epsilon_select(n)?;
    let mut history: Vec<Inertia> = Vec::new();
    let mut halvings = 0;
    let perturbed_inertia = loop {
        match inertia_ldl_at(n, eps.clone()) {
            Ok((inertia, _)) => history.push(inertia),
            // an exact root of some minor polynomial: skip this ε
            Err(GstError::Numerical(_)) => history.clear(),
            Err(e) => return Err(e),
        }
        if let [.., a, b, c] = history.as_slice() {
            if a == b && b == c {
                break *c;
            }
        }
        if halvings == MAX_HALVINGS {
            return Err(GstError::Numerical(format!("pivot signs never settled for n = {n}")));
        }
        eps /= Rational::from_integer(2.into());
        halvings += 1;
    };

    let n_zero = n - rank_h(n)?;
    if n_zero != 1 || perturbed_inertia.n_pos == 0 {
        return Err(GstError::Numerical(format!("unexpected kernel dimension {n_zero} for n = {n}")));
    }
    let inertia = Inertia {
        n_pos: perturbed_inertia.n_pos - 1,
        n_neg: perturbed_inertia.n_neg,
        n_zero,
    };

    let h = hessian::<f64>(n)?.h;
    let eig = eigen_sym(&h, 1e-14 * h.max_abs())?;
    let eigen = Inertia::from_floats(&eig.values, 1e-10 * h.max_abs());
    if eigen != inertia {
        return Err(GstError::Disagreement(format!(
            "n = {n}: LDLᵀ gives {inertia:?}, eigensolver gives {eigen:?}"
        )));
    }
    Ok(InertiaReport {
        n,
        inertia,
        perturbed: perturbed_inertia,
        epsilon: eps.to_repr(),
        halvings,
        eigen,
        eigenvalues: eig.values,
    })
}
