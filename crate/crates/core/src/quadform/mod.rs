//! The independence form ψ, its gradient and Hessian, and inertia tools.
//!
//! With `N = 2^{n-1}`,
//!
//! ```text
//! ψ(p) = (N⁻¹ Σ_k C(n-1,k) p_{k+1})² − N⁻¹ Σ_k C(n-2,k) (p_{k+2}² + p_{k+1} p_{n-k-1})
//! ```
//!
//! ψ is a quadratic form `pᵀ Q_n p` with Hessian `H_n = 2 Q_n`. The
//! Hessian is assembled entry by entry from its closed form, independently
//! of the evaluation of ψ, so `ψ(p) = pᵀQp` is a genuine cross-check.

mod eigen;
mod ldl;

pub use eigen::{eigen_sym, SymmetricEigen, JACOBI_MAX_SWEEPS};
pub use ldl::{
    middle_pivot_even, middle_pivot_even_narrow, middle_pivot_odd, epsilon_select,
    inertia_ldl, inertia_of_h, ldl_exact, perturbation, Inertia, InertiaReport, LdlTrace,
};

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{GstError, Result};
use crate::linalg::{rank_exact, Matrix};
use crate::scalar::{binom_s, pow2, Rational, Scalar};

/// Evaluates ψ directly from its defining sums. Any `n >= 2`; entries may
/// lie outside `[0, 1]`.
pub fn psi<T: Scalar>(p: &[T]) -> T {
    let n = p.len() as i64;
    assert!(n >= 2, "ψ needs at least two coordinates");
    let big_n: T = pow2((n - 1) as u32);
    let weighted = p
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, pk)| acc + binom_s::<T>(n - 1, k as i64) * pk.clone());
    let mean = weighted / big_n.clone();
    let mut second = T::zero();
    for k in 0..=(n - 2) as usize {
        let c: T = binom_s(n - 2, k as i64);
        let same = p[k + 1].clone() * p[k + 1].clone();
        let opposite = p[k].clone() * p[n as usize - k - 2].clone();
        second = second + c * (same + opposite);
    }
    mean.clone() * mean - second / big_n
}

/// First partials of ψ.
pub fn psi_gradient<T: Scalar>(p: &[T]) -> Vec<T> {
    let n = p.len() as i64;
    assert!(n >= 2, "ψ needs at least two coordinates");
    let big_n: T = pow2((n - 1) as u32);
    let two = T::from_i64(2);
    let weighted = p
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, pk)| acc + binom_s::<T>(n - 1, k as i64) * pk.clone());
    (1..=n)
        .map(|i| {
            let lead = two.clone() / (big_n.clone() * big_n.clone())
                * binom_s::<T>(n - 1, i - 1)
                * weighted.clone();
            // the same-state term vanishes at i = 1, the opposite-state term at i = n
            let mut bracket = binom_s::<T>(n - 2, i - 2) * p[(i - 1) as usize].clone();
            if i < n {
                bracket = bracket + binom_s::<T>(n - 2, i - 1) * p[(n - i - 1) as usize].clone();
            }
            lead - two.clone() / big_n.clone() * bracket
        })
        .collect()
}

/// Second partial `∂²ψ/∂p_i∂p_j` (1-based indices).
pub fn hessian_entry<T: Scalar>(n: usize, i: usize, j: usize) -> T {
    rank_one_entry::<T>(n, i, j) - x_entry::<T>(n, i, j)
}

/// `(v vᵀ)_{ij} = (2/N²) C(n-1,i-1) C(n-1,j-1)`; `v` itself carries a √2.
fn rank_one_entry<T: Scalar>(n: usize, i: usize, j: usize) -> T {
    let (n, i, j) = (n as i64, i as i64, j as i64);
    let big_n: T = pow2((n - 1) as u32);
    T::from_i64(2) / (big_n.clone() * big_n) * binom_s::<T>(n - 1, i - 1) * binom_s::<T>(n - 1, j - 1)
}

/// `X = v vᵀ − H`: diagonal `(2/N)C(n-2,i-2)` (plus `(2/N)C(n-2,i-1)` at
/// `i = n/2`) and anti-diagonal `i + j = n` entries `(2/N)C(n-2,i-1)`.
fn x_entry<T: Scalar>(n: usize, i: usize, j: usize) -> T {
    let (n, i, j) = (n as i64, i as i64, j as i64);
    let two_over_n = T::from_i64(2) / pow2::<T>((n - 1) as u32);
    let mut v = T::zero();
    if i == j {
        v = v + two_over_n.clone() * binom_s::<T>(n - 2, i - 2);
    }
    if i + j == n {
        v = v + two_over_n * binom_s::<T>(n - 2, i - 1);
    }
    v
}

/// Exact matrices attached to ψ for a given `n`.
#[derive(Debug, Clone)]
pub struct QuadInfo<T> {
    pub n: usize,
    /// Matrix of the form: `ψ(p) = pᵀ Q p`.
    pub q: Matrix<T>,
    /// Hessian, `2 Q`.
    pub h: Matrix<T>,
    /// The rational rank-one part `v vᵀ`.
    pub vvt: Matrix<T>,
    /// `v vᵀ − H`.
    pub x: Matrix<T>,
}

pub fn hessian<T: Scalar>(n: usize) -> Result<QuadInfo<T>> {
    if n < 3 {
        return Err(GstError::Invalid(format!("Hessian needs n >= 3, got {n}")));
    }
    let h = Matrix::from_fn(n, n, |i, j| hessian_entry::<T>(n, i + 1, j + 1));
    let vvt = Matrix::from_fn(n, n, |i, j| rank_one_entry::<T>(n, i + 1, j + 1));
    let x = Matrix::from_fn(n, n, |i, j| x_entry::<T>(n, i + 1, j + 1));
    let q = h.scale(&T::ratio(1, 2));
    Ok(QuadInfo { n, q, h, vvt, x })
}

/// `CT(p, q) = 2 pᵀ Q_n q`.
pub fn cross_term<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(GstError::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    let info = hessian::<T>(p.len())?;
    info.h.bilinear(p, q)
}

/// Exact rank of `X`.
pub fn rank_x(n: usize) -> Result<usize> {
    Ok(rank_exact(&hessian::<Rational>(n)?.x))
}

/// Exact rank of `H_n`.
pub fn rank_h(n: usize) -> Result<usize> {
    Ok(rank_exact(&hessian::<Rational>(n)?.h))
}

/// JSON dump of `H_n` with the integer form of `X` scaled by `2^{n-2}`.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: Vec<Vec<String>>,
    #[serde(rename = "X_scaled")]
    pub x_scaled: Vec<Vec<String>>,
    pub scaled_by: String,
}

pub fn matrix_dump(n: usize) -> Result<MatrixDump> {
    let info = hessian::<Rational>(n)?;
    let scale = Rational::from_integer(BigInt::one() << (n - 2));
    let h = info.h.map(|v| v.to_repr()).to_rows();
    let x_scaled = info.x.map(|v| (v.clone() * scale.clone()).to_repr()).to_rows();
    Ok(MatrixDump { n, h, x_scaled, scaled_by: format!("2^{}", n - 2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn psi_tequila_point_vanishes() {
        assert_eq!(psi(&[q(1, 1), q(1, 2), q(1, 3)]), Rational::zero());
    }

    #[test]
    fn psi_constant_vanishes() {
        for n in 2..=12 {
            assert_eq!(psi(&vec![q(3, 7); n]), Rational::zero(), "n = {n}");
        }
    }

    #[test]
    fn psi_n3_factorization() {
        let p = [q(2, 3), q(1, 5), q(4, 9)];
        let expected = q(1, 16) * (p[0].clone() - p[2].clone())
            * (p[0].clone() - q(4, 1) * p[1].clone() + q(3, 1) * p[2].clone());
        assert_eq!(psi(&p), expected);
    }

    #[test]
    fn psi_n2_is_negative_square() {
        let p = [q(1, 3), q(3, 4)];
        let d = p[0].clone() - p[1].clone();
        assert_eq!(psi(&p), -(d.clone() * d) / q(4, 1));
    }

    #[test]
    fn gradient_vanishes_at_midpoint() {
        for n in 3..=10 {
            let g = psi_gradient(&vec![q(1, 2); n]);
            assert!(g.iter().all(Zero::is_zero), "n = {n}");
        }
    }

    #[test]
    fn gradient_matches_hessian_times_p() {
        let p = vec![q(1, 1), q(1, 2), q(1, 3), q(1, 4), q(1, 5), q(2, 7)];
        let h = hessian::<Rational>(6).unwrap().h;
        assert_eq!(psi_gradient(&p), h.mul_vec(&p).unwrap());
    }

    #[test]
    fn gradient_finite_differences_n5() {
        let p = [1.0, 0.5, 1.0 / 3.0, 0.25, 0.2];
        let g = psi_gradient(&p);
        let h = 1e-5;
        for i in 0..5 {
            let mut up = p;
            let mut dn = p;
            up[i] += h;
            dn[i] -= h;
            let fd = (psi(&up) - psi(&dn)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "component {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn hessian_rows_sum_to_zero() {
        for n in 3..=12 {
            let h = hessian::<Rational>(n).unwrap().h;
            assert!(h.is_symmetric());
            assert!(h.row_sums().iter().all(Zero::is_zero), "n = {n}");
        }
    }

    #[test]
    fn hessian_is_rank_one_minus_x() {
        for n in 3..=9 {
            let info = hessian::<Rational>(n).unwrap();
            assert_eq!(info.vvt.sub(&info.x).unwrap(), info.h);
            assert_eq!(info.q.scale(&q(2, 1)), info.h);
        }
    }

    #[test]
    fn x_scaled_n4_display() {
        // anti-diagonal i + j = 4 carries C(2,0), C(2,1), C(2,2); the diagonal
        // carries C(2,i-2), with both contributions meeting at i = j = 2
        let dump = matrix_dump(4).unwrap();
        let expect = [
            ["0", "0", "1", "0"],
            ["0", "3", "0", "0"],
            ["1", "0", "2", "0"],
            ["0", "0", "0", "1"],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(dump.x_scaled[i][j], expect[i][j], "({i},{j})");
            }
        }
        assert_eq!(dump.scaled_by, "2^2");
    }

    #[test]
    fn hessian_rejects_small_n() {
        assert!(hessian::<Rational>(2).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_x(4).unwrap(), 4);
        assert_eq!(rank_x(5).unwrap(), 5);
        for n in 3..=12 {
            assert_eq!(rank_x(n).unwrap(), n, "rank X, n = {n}");
            assert_eq!(rank_h(n).unwrap(), n - 1, "rank H, n = {n}");
        }
    }

    #[test]
    fn cross_term_with_ones_vanishes() {
        let p = vec![q(1, 3), q(2, 5), q(1, 1), q(0, 1), q(5, 6)];
        assert_eq!(cross_term(&p, &vec![q(1, 1); 5]).unwrap(), Rational::zero());
        assert!(cross_term(&p, &[q(1, 1)]).is_err());
    }
}
