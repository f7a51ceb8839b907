//! Points of `Ind_n`, `Inf_n` and `GST_n = Ind_n ∩ Inf_n`: membership,
//! explicit families, and the affine structure of the independence set.

mod boundary;
mod theta;

pub use boundary::{boundary_point, AlgebraicPoint, AlgebraicVerdict, QuadraticCertificate};
pub use theta::{f_eval, f_poly, theta_point, theta_roots, ThetaRoot, GRID_EXPONENT};

pub use crate::quadform::cross_term;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{GstError, Result};
use crate::io::{scalar_to_json, vector_from_json, vector_to_json};
use crate::model::GameSpec;
use crate::quadform::psi;
use crate::scalar::Scalar;

/// Default float tolerance for `|ψ|` and for influence margins.
pub const FLOAT_TOL: f64 = 1e-10;

/// `max_s |p_s − p_{n−s+1}|`: zero exactly on the no-influence subspace.
pub fn influence_margin<T: Scalar>(p: &[T]) -> f64 {
    let n = p.len();
    (0..n / 2).map(|s| (p[s].clone() - p[n - 1 - s].clone()).to_f64().abs()).fold(0.0, f64::max)
}

/// Smallest 1-based `s` with `p_s ≠ p_{n−s+1}` (beyond `tol` in float mode).
pub fn influence_witness<T: Scalar>(p: &[T], tol: f64) -> Option<usize> {
    let n = p.len();
    (0..n / 2)
        .find(|&s| !(p[s].clone() - p[n - 1 - s].clone()).is_negligible(tol))
        .map(|s| s + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport<T> {
    pub p: Vec<T>,
    pub in_box: bool,
    pub psi_value: T,
    pub in_ind: bool,
    pub in_inf: bool,
    pub in_gst: bool,
    pub influence_witness: Option<usize>,
    pub influence_margin: f64,
}

impl<T: Scalar> MembershipReport<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.p.len(),
            "mode": T::MODE,
            "p": vector_to_json(&self.p),
            "in_box": self.in_box,
            "psi_value": scalar_to_json(&self.psi_value),
            "in_ind": self.in_ind,
            "in_inf": self.in_inf,
            "in_gst": self.in_gst,
            "influence_witness": self.influence_witness,
            "influence_margin": self.influence_margin,
        })
    }
}

/// Classifies `p`. In exact mode `tol` is ignored; in float mode
/// `|ψ| ≤ tol` counts as independent and a coordinate pair must differ by
/// more than `tol` to witness influence.
pub fn membership<T: Scalar>(p: &[T], tol: f64) -> MembershipReport<T> {
    let in_box = p.iter().all(|v| *v >= T::zero() && *v <= T::one());
    let psi_value = psi(p);
    let in_ind = in_box && psi_value.is_negligible(tol);
    let witness = influence_witness(p, tol);
    let in_inf = witness.is_some() && in_box;
    MembershipReport {
        p: p.to_vec(),
        in_box,
        in_ind,
        in_inf,
        in_gst: in_ind && in_inf,
        influence_witness: witness,
        influence_margin: influence_margin(p),
        psi_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfluenceKind {
    /// Every cause influences its own effect.
    I1,
    /// Every cause influences every effect.
    I2,
}

/// Brute-force influence check: `C_j` influences `E_i` when some
/// assignment of the other causes makes flipping `C_j` change
/// `P(E_i | all causes)`.
pub fn influence_oracle<T: Scalar>(spec: &GameSpec<T>, kind: InfluenceKind) -> Result<bool> {
    spec.check_cap()?;
    let n = spec.n();
    let influences = |j: usize, i: usize| {
        (0u64..1 << n).filter(|bits| bits >> j & 1 == 0).any(|bits| {
            let flipped = bits | 1 << j;
            let z0 = n - bits.count_ones() as usize;
            spec.effect_given_bits(i, bits, z0) != spec.effect_given_bits(i, flipped, z0 - 1)
        })
    };
    Ok(match kind {
        InfluenceKind::I1 => (0..n).all(|i| influences(i, i)),
        InfluenceKind::I2 => (0..n).all(|j| (0..n).all(|i| influences(j, i))),
    })
}

/// `1 − p`.
pub fn involution<T: Scalar>(p: &[T]) -> Vec<T> {
    p.iter().map(|v| T::one() - v.clone()).collect()
}

/// `x·p + y·1`; may leave the cube.
pub fn affine_point<T: Scalar>(p: &[T], x: &T, y: &T) -> Vec<T> {
    p.iter().map(|v| x.clone() * v.clone() + y.clone()).collect()
}

/// `p = a·q + b·1` with `a ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivWitness<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> EquivWitness<T> {
    /// Witness for the reverse direction.
    pub fn inverse(&self) -> Self {
        let a = T::one() / self.a.clone();
        let b = -(self.b.clone() * a.clone());
        Self { a, b }
    }

    /// If `self: p ∼ q` and `other: q ∼ r`, the witness for `p ∼ r`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a.clone() * other.a.clone(),
            b: self.a.clone() * other.b.clone() + self.b.clone(),
        }
    }
}

/// Solves `p = a·q + b·1` from two coordinates where `q` differs and checks
/// the remaining ones.
pub fn equivalent<T: Scalar>(p: &[T], q: &[T], tol: f64) -> Result<Option<EquivWitness<T>>> {
    if p.len() != q.len() {
        return Err(GstError::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    if p.is_empty() {
        return Ok(None);
    }
    let close = |a: &T, b: &T| (a.clone() - b.clone()).is_negligible(tol);
    let witness = match (1..q.len()).find(|&j| !close(&q[j], &q[0])) {
        None => {
            // q constant: only a constant p is related to it
            if p.iter().all(|v| close(v, &p[0])) {
                EquivWitness { a: T::one(), b: p[0].clone() - q[0].clone() }
            } else {
                return Ok(None);
            }
        }
        Some(j) => {
            let a = (p[j].clone() - p[0].clone()) / (q[j].clone() - q[0].clone());
            if a.is_negligible(tol) {
                return Ok(None);
            }
            let b = p[0].clone() - a.clone() * q[0].clone();
            EquivWitness { a, b }
        }
    };
    let ok = p
        .iter()
        .zip(q)
        .all(|(pi, qi)| close(pi, &(witness.a.clone() * qi.clone() + witness.b.clone())));
    Ok(ok.then_some(witness))
}

/// Point file: `{"n": int, "p": [...], "certificates": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub n: usize,
    pub p: Vec<Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub certificates: BTreeMap<String, Value>,
}

impl PointFile {
    pub fn from_vector<T: Scalar>(p: &[T]) -> Self {
        let p = match vector_to_json(p) {
            Value::Array(items) => items,
            _ => unreachable!(),
        };
        Self { n: p.len(), p, certificates: BTreeMap::new() }
    }

    pub fn to_vector<T: Scalar>(&self) -> Result<Vec<T>> {
        if self.p.len() != self.n {
            return Err(GstError::DimensionMismatch { expected: self.n, got: self.p.len() });
        }
        vector_from_json(&Value::Array(self.p.clone()))
    }
}
