//! Geometry of the solution set around the cube centre `m = (1/2, …, 1/2)`.
//!
//! In eigen-coordinates `y = Pᵀ(p − m)` the form becomes
//! `ψ = Σ λ_i y_i² − Σ |μ_j| y_{k+j}²`, with a free kernel coordinate. The
//! independence set near `m` is therefore a cone over a product of two
//! spheres, which is what the probes below exploit.

mod path;
mod sample;

pub use path::{path_probe, FailureCertificate, PathParams, ProbeOutcome, SurfacePath};
pub use sample::{surface_sample, SampleReport};

use serde::Serialize;

use crate::error::{GstError, Result};
use crate::linalg::Matrix;
use crate::points::{equivalent, influence_witness, membership};
use crate::quadform::{cross_term, eigen_sym, hessian, psi};
use crate::scalar::Scalar;

/// Orthonormal eigenbasis of `Q_n`, columns ordered kernel first, then the
/// `k` positive eigenvalues (descending), then the `l` negative ones
/// (ascending in magnitude).
#[derive(Debug, Clone, Serialize)]
pub struct EigenFrame {
    pub n: usize,
    pub p: Matrix<f64>,
    pub d: Vec<f64>,
    pub k: usize,
    pub l: usize,
}

impl EigenFrame {
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.p[(i, c)]).collect()
    }

    /// `y = Pᵀ(p − m)`.
    pub fn to_eigen(&self, p: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|c| (0..self.n).map(|i| self.p[(i, c)] * (p[i] - 0.5)).sum())
            .collect()
    }

    /// `p = m + P·y`.
    pub fn from_eigen(&self, y: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| 0.5 + (0..self.n).map(|c| self.p[(i, c)] * y[c]).sum::<f64>())
            .collect()
    }

    /// `yᵀ D y`.
    pub fn form(&self, y: &[f64]) -> f64 {
        y.iter().zip(&self.d).map(|(v, d)| d * v * v).sum()
    }

    pub fn positive(&self) -> std::ops::Range<usize> {
        1..1 + self.k
    }

    pub fn negative(&self) -> std::ops::Range<usize> {
        1 + self.k..self.n
    }
}

pub fn eigen_frame(n: usize) -> Result<EigenFrame> {
    let q = hessian::<f64>(n)?.q;
    let scale = q.max_abs();
    let e = eigen_sym(&q, 1e-14 * scale)?;
    let kernel = (0..n)
        .min_by(|&a, &b| e.values[a].abs().total_cmp(&e.values[b].abs()))
        .expect("n >= 3");
    if e.values[kernel].abs() > 1e-10 * scale {
        return Err(GstError::Numerical(format!("no null eigenvalue found for n = {n}")));
    }
    let mut order = vec![kernel];
    order.extend((0..n).filter(|&c| c != kernel && e.values[c] > 0.0));
    let k = order.len() - 1;
    // eigenvalues are sorted descending, so negatives come smallest-magnitude first
    order.extend((0..n).filter(|&c| c != kernel && e.values[c] < 0.0));
    let l = order.len() - 1 - k;
    if k + l + 1 != n {
        return Err(GstError::Numerical(format!("spectrum of Q_{n} has a second null direction")));
    }
    let mut p = Matrix::from_fn(n, n, |i, j| e.vectors[(i, order[j])]);
    // sign convention: largest-magnitude entry of each column is positive
    for c in 0..n {
        let pivot = (0..n).max_by(|&a, &b| p[(a, c)].abs().total_cmp(&p[(b, c)].abs())).unwrap();
        if p[(pivot, c)] < 0.0 {
            for i in 0..n {
                p[(i, c)] = -p[(i, c)];
            }
        }
    }
    let d = order.iter().map(|&c| e.values[c]).collect();
    Ok(EigenFrame { n, p, d, k, l })
}

/// Which of the two pieces of a disconnected `GST_n` a point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentLabel {
    pub sign: i8,
}

/// Sign of the eigen-coordinate paired with the eigenvalue whose sign is
/// unique (`min(k, l) = 1`). That coordinate vanishes on `GST_n` only on
/// `m + span(1)`, which has no influence.
pub fn component_label<T: Scalar>(frame: &EigenFrame, p: &[T], tol: f64) -> Result<ComponentLabel> {
    if p.len() != frame.n {
        return Err(GstError::DimensionMismatch { expected: frame.n, got: p.len() });
    }
    let c = match (frame.k, frame.l) {
        (1, _) => 1,
        (_, 1) => frame.n - 1,
        (k, l) => {
            return Err(GstError::NotApplicable(format!(
                "component certificate needs a unique-sign eigenvalue; n = {} has k = {k}, l = {l}",
                frame.n
            )))
        }
    };
    let report = membership(p, tol);
    if !report.in_gst {
        return Err(GstError::NotInGst(format!("ψ = {}, witness {:?}", report.psi_value, report.influence_witness)));
    }
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let y = frame.to_eigen(&pf)[c];
    if y.abs() < 1e-12 {
        return Err(GstError::Numerical(format!("certificate coordinate too small to sign ({y:e})")));
    }
    Ok(ComponentLabel { sign: if y > 0.0 { 1 } else { -1 } })
}

/// `(1 − t)·p + t·x` for a constant `x`; stays in `Ind_n` for all `t`.
pub fn contraction<T: Scalar>(p: &[T], t: &T, x: &[T], tol: f64) -> Result<Vec<T>> {
    if p.len() != x.len() {
        return Err(GstError::DimensionMismatch { expected: p.len(), got: x.len() });
    }
    let ones = vec![T::one(); x.len()];
    if equivalent(x, &ones, tol)?.is_none() {
        return Err(GstError::Invalid("contraction target must be equivalent to the ones vector".into()));
    }
    if !membership(p, tol).in_ind {
        return Err(GstError::Invalid("contraction needs a starting point in Ind_n".into()));
    }
    if *t < T::zero() || *t > T::one() {
        return Err(GstError::Invalid(format!("t = {t} outside [0, 1]")));
    }
    let s = T::one() - t.clone();
    Ok(p.iter().zip(x).map(|(a, b)| s.clone() * a.clone() + t.clone() * b.clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SegmentClass {
    /// Every point of the closed segment lies in `GST_n`.
    AllInGst,
    /// The segment lies in `Ind_n` but finitely many points lose influence.
    AllInIndNotGst,
    /// `CT ≠ 0`: every interior point is outside `Ind_n`.
    InteriorOutsideInd,
    /// Sampled values contradict the exact classification (float mode only).
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub class: SegmentClass,
    pub cross_term: String,
    /// `(t, point)` where influence fails.
    pub failures: Vec<(String, Vec<String>)>,
    pub samples: usize,
    pub max_abs_psi_sampled: f64,
}

/// Classifies the segment `(1 − t)p + t q`. With both ends in `Ind_n`,
/// `ψ` along it is `t(1 − t)·CT(p, q)`.
pub fn segment_classify<T: Scalar>(p: &[T], q: &[T], samples: usize, tol: f64) -> Result<SegmentReport> {
    if p.len() != q.len() {
        return Err(GstError::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    for (name, v) in [("p", p), ("q", q)] {
        if !membership(v, tol).in_gst {
            return Err(GstError::NotInGst(format!("segment endpoint {name}")));
        }
    }
    let n = p.len();
    let ct = cross_term(p, q)?;
    let at = |t: &T| -> Vec<T> {
        let s = T::one() - t.clone();
        p.iter().zip(q).map(|(a, b)| s.clone() * a.clone() + t.clone() * b.clone()).collect()
    };

    let mut failures = Vec::new();
    let mut class = if ct.is_negligible(tol) {
        // candidates: zeros of each pair difference, linear in t
        let mut cands: Vec<T> = Vec::new();
        for s in 0..n / 2 {
            let a = p[s].clone() - p[n - 1 - s].clone();
            let b = q[s].clone() - q[n - 1 - s].clone();
            let slope = b - a.clone();
            if slope.is_negligible(tol) {
                continue;
            }
            let t = -(a / slope);
            if t > T::zero() && t < T::one() && !cands.iter().any(|c| (c.clone() - t.clone()).is_negligible(tol)) {
                cands.push(t);
            }
        }
        for t in cands {
            let x = at(&t);
            if influence_witness(&x, tol).is_none() {
                failures.push((t.to_repr(), x.iter().map(Scalar::to_repr).collect()));
            }
        }
        if failures.is_empty() {
            SegmentClass::AllInGst
        } else {
            SegmentClass::AllInIndNotGst
        }
    } else {
        SegmentClass::InteriorOutsideInd
    };

    let mut max_abs = 0.0f64;
    let mut contradiction = false;
    for j in 1..=samples {
        let t = T::ratio(j as i64, samples as i64 + 1);
        let v = psi(&at(&t));
        max_abs = max_abs.max(v.to_f64().abs());
        let zero = v.is_negligible(tol);
        contradiction |= zero == (class == SegmentClass::InteriorOutsideInd);
    }
    if contradiction {
        class = SegmentClass::Mixed;
    }
    Ok(SegmentReport { class, cross_term: ct.to_repr(), failures, samples, max_abs_psi_sampled: max_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{boundary_point, involution, FLOAT_TOL};
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn tequila() -> Vec<Rational> {
        vec![q(1, 1), q(1, 2), q(1, 3)]
    }

    #[test]
    fn frame_signatures() {
        assert_eq!((eigen_frame(3).unwrap().k, eigen_frame(3).unwrap().l), (1, 1));
        assert_eq!((eigen_frame(4).unwrap().k, eigen_frame(4).unwrap().l), (1, 2));
        let f8 = eigen_frame(8).unwrap();
        assert!(f8.k >= 2 && f8.l >= 2);
    }

    #[test]
    fn frame_diagonalizes_q() {
        for n in 3..=10 {
            let f = eigen_frame(n).unwrap();
            let qm = hessian::<f64>(n).unwrap().q;
            let pqp = f.p.transpose().matmul(&qm).unwrap().matmul(&f.p).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { f.d[i] } else { 0.0 };
                    assert!((pqp[(i, j)] - want).abs() < 1e-9, "n = {n}");
                }
            }
            let c0 = f.column(0);
            let r = 1.0 / (n as f64).sqrt();
            assert!(c0.iter().all(|v| (v - r).abs() < 1e-9), "n = {n}");
            let y = f.to_eigen(&[0.3; 3].repeat(4)[..n]);
            assert!(f.from_eigen(&y).iter().all(|v| (v - 0.3).abs() < 1e-12));
        }
    }

    #[test]
    fn labels_flip_under_involution() {
        let f3 = eigen_frame(3).unwrap();
        let p = tequila();
        let a = component_label(&f3, &p, 0.0).unwrap();
        let b = component_label(&f3, &involution(&p), 0.0).unwrap();
        assert_eq!(a.sign, -b.sign);
        let t = vec![q(1, 3), q(1, 9), q(1, 27)];
        assert_eq!(component_label(&f3, &t, 0.0).unwrap(), a);

        let f4 = eigen_frame(4).unwrap();
        let bp = boundary_point(4).unwrap();
        let x = component_label(&f4, &bp.to_f64(), FLOAT_TOL).unwrap();
        let y = component_label(&f4, &bp.involution().to_f64(), FLOAT_TOL).unwrap();
        assert_eq!(x.sign, -y.sign);
    }

    #[test]
    fn labels_need_a_unique_sign() {
        let f8 = eigen_frame(8).unwrap();
        let p = boundary_point(8).unwrap().to_f64();
        assert!(matches!(component_label(&f8, &p, FLOAT_TOL), Err(GstError::NotApplicable(_))));
        let f3 = eigen_frame(3).unwrap();
        assert!(matches!(
            component_label(&f3, &[q(1, 1), q(0, 1), q(1, 1)], 0.0),
            Err(GstError::NotInGst(_))
        ));
    }

    #[test]
    fn contraction_examples() {
        let p = tequila();
        let m = vec![q(1, 2); 3];
        assert_eq!(contraction(&p, &q(0, 1), &m, 0.0).unwrap(), p);
        assert_eq!(contraction(&p, &q(1, 1), &m, 0.0).unwrap(), m);
        let mid = contraction(&p, &q(1, 2), &m, 0.0).unwrap();
        assert_eq!(psi(&mid), q(0, 1));
        assert!(contraction(&p, &q(1, 2), &p, 0.0).is_err());
    }

    #[test]
    fn segment_regimes() {
        let p = tequila();
        // scaling towards 0: p / max(p) = p here, so use a scaled copy
        let half: Vec<Rational> = p.iter().map(|v| v * q(1, 2)).collect();
        let r = segment_classify(&half, &p, 9, 0.0).unwrap();
        assert_eq!(r.class, SegmentClass::AllInGst);

        let r = segment_classify(&p, &involution(&p), 9, 0.0).unwrap();
        assert_eq!(r.class, SegmentClass::AllInIndNotGst);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].0, "1/2");
        assert!(r.failures[0].1.iter().all(|v| v == "1/2"));

        // GST_3 sits in a plane, so the outside regime needs larger n
        let roots = crate::points::theta_roots(10, 1e-14).unwrap();
        let at = |th: f64| -> Vec<f64> { (1..=10).map(|k| th.powi(k)).collect() };
        let (a, b) = (at(roots[0].value), at(roots[2].value));
        let r = segment_classify(&a, &b, 5, FLOAT_TOL).unwrap();
        assert_eq!(r.class, SegmentClass::InteriorOutsideInd);
        assert!(segment_classify(&p, &[q(1, 1), q(0, 1), q(1, 1)], 3, 0.0).is_err());
    }
}
