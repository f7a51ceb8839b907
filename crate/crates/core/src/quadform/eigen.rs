use serde::Serialize;

use crate::error::{GstError, Result};
use crate::linalg::Matrix;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = V·diag(values)·Vᵀ`, eigenvalues descending,
/// eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

fn off_diagonal_norm(a: &Matrix<f64>) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `tol`.
pub fn eigen_sym(m: &Matrix<f64>, tol: f64) -> Result<SymmetricEigen> {
    if !m.is_square() {
        return Err(GstError::Invalid("eigen_sym needs a square matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(GstError::Invalid("tolerance must be positive".into()));
    }
    let n = m.rows();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(GstError::Invalid("eigen_sym needs a symmetric matrix".into()));
            }
        }
    }

    let mut a = m.clone();
    let mut v = Matrix::<f64>::identity(n);
    let mut sweeps = 0;
    while off_diagonal_norm(&a) >= tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(GstError::Numerical(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal {:e})",
                off_diagonal_norm(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}
