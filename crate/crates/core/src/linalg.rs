//! Small dense matrices and exact elimination.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{GstError, Result};
use crate::scalar::{Rational, Scalar};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(GstError::DimensionMismatch { expected: c, got: bad.len() });
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)].clone())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(GstError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(GstError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        }))
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> Result<T> {
        if u.len() != self.rows {
            return Err(GstError::DimensionMismatch { expected: self.rows, got: u.len() });
        }
        let mv = self.mul_vec(v)?;
        Ok(u.iter().zip(mv).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(GstError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, x| acc + x.clone()))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Scales a rational matrix by the lcm of its denominators.
fn clear_denominators(m: &Matrix<Rational>) -> Matrix<BigInt> {
    let lcm = m.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    m.map(|x| x.numer() * (&lcm / x.denom()))
}

/// Exact rank by fraction-free (Bareiss) elimination with row pivoting.
pub fn rank_exact(m: &Matrix<Rational>) -> usize {
    let mut a = clear_denominators(m);
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                a.data.swap(pivot * cols + j, rank * cols + j);
            }
        }
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = (&a[(rank, col)] * &a[(i, j)] - &a[(i, col)] * &a[(rank, j)]) / &prev;
                a[(i, j)] = v;
            }
            a[(i, col)] = BigInt::zero();
        }
        prev = a[(rank, col)].clone();
        rank += 1;
    }
    rank
}

/// All leading principal minors `det(M_1), …, det(M_n)` of a square rational
/// matrix, computed by Bareiss elimination without pivoting. Once a pivot
/// vanishes the remaining minors are computed directly.
pub fn leading_minors(m: &Matrix<Rational>) -> Vec<Rational> {
    let n = m.rows;
    let lcm = m.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut a = m.map(|x| x.numer() * (&lcm / x.denom()));
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    let mut scale = Rational::one();
    for k in 0..n {
        scale /= Rational::from_integer(lcm.clone());
        if a[(k, k)].is_zero() {
            // Bareiss breaks down; finish with independent determinants.
            minors.push(Rational::zero());
            for kk in k + 1..n {
                minors.push(det_exact(&m.leading(kk + 1)));
            }
            return minors;
        }
        minors.push(Rational::from_integer(a[(k, k)].clone()) * scale.clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    minors
}

/// Exact determinant with row pivoting.
pub fn det_exact(m: &Matrix<Rational>) -> Rational {
    let n = m.rows;
    let lcm = m.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut a = m.map(|x| x.numer() * (&lcm / x.denom()));
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&r| !a[(r, k)].is_zero()) else {
            return Rational::zero();
        };
        if pivot != k {
            for j in 0..n {
                a.data.swap(pivot * n + j, k * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    let det = if n == 0 { BigInt::one() } else { a[(n - 1, n - 1)].clone() };
    Rational::new(det * sign, num_traits::pow(lcm, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn rank_of_singular_and_regular() {
        assert_eq!(rank_exact(&qm(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_exact(&qm(&[&[0, 1], &[1, 0]])), 2);
        assert_eq!(rank_exact(&qm(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_exact(&qm(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
        let m = Matrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 4), q(1, 6)]]).unwrap();
        assert_eq!(rank_exact(&m), 1);
    }

    #[test]
    fn determinant_and_minors_agree() {
        let m = Matrix::from_rows(vec![
            vec![q(2, 3), q(1, 2), q(0, 1)],
            vec![q(1, 2), q(-1, 5), q(3, 1)],
            vec![q(0, 1), q(3, 1), q(7, 2)],
        ])
        .unwrap();
        let minors = leading_minors(&m);
        for k in 0..3 {
            assert_eq!(minors[k], det_exact(&m.leading(k + 1)), "minor {k}");
        }
        // cofactor expansion
        let d = q(2, 3) * (q(-1, 5) * q(7, 2) - q(9, 1)) - q(1, 2) * (q(1, 2) * q(7, 2));
        assert_eq!(det_exact(&m), d);
    }

    #[test]
    fn minors_after_zero_pivot() {
        let m = qm(&[&[0, 1], &[1, 0]]);
        assert_eq!(leading_minors(&m), vec![q(0, 1), q(-1, 1)]);
    }

    #[test]
    fn symmetric_and_products() {
        let m = qm(&[&[1, 2], &[2, 3]]);
        assert!(m.is_symmetric());
        assert!(!qm(&[&[1, 2], &[3, 4]]).is_symmetric());
        let v = m.mul_vec(&[q(1, 1), q(-1, 1)]).unwrap();
        assert_eq!(v, vec![q(-1, 1), q(-1, 1)]);
        assert_eq!(m.bilinear(&[q(1, 1), q(0, 1)], &[q(0, 1), q(1, 1)]).unwrap(), q(2, 1));
        assert_eq!(m.matmul(&Matrix::identity(2)).unwrap(), m);
        assert!(m.mul_vec(&[q(1, 1)]).is_err());
    }
}
