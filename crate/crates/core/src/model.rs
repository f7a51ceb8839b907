//! The cause/effect game and exact enumeration oracles.
//!
//! Causes `C_1..C_n` are independent Bernoulli(r). Given all causes, the
//! effects are conditionally independent and player `i` fires with
//! probability `p_k` when `x_i = 0` and `k` causes (including its own) are
//! zero, or `q_k` when `x_i = 1` and `k` causes are one.
//!
//! Indices in this API are 0-based; `p[k - 1]` holds `p_k`.

use serde::{Deserialize, Serialize};

use crate::error::{GstError, Result};
use crate::linalg::Matrix;
use crate::scalar::{binom_s, pow2, Scalar};

/// Largest `n` accepted by the exact enumeration oracles.
pub const ENUMERATION_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec<T> {
    r: T,
    p: Vec<T>,
    q: Vec<T>,
}

impl<T: Scalar> GameSpec<T> {
    pub fn new(r: T, p: Vec<T>, q: Vec<T>) -> Result<Self> {
        if p.len() < 2 {
            return Err(GstError::Invalid(format!("n must be at least 2, got {}", p.len())));
        }
        if q.len() != p.len() {
            return Err(GstError::DimensionMismatch { expected: p.len(), got: q.len() });
        }
        if !(r > T::zero() && r < T::one()) {
            return Err(GstError::Invalid(format!("r = {r} must lie in (0, 1)")));
        }
        for (name, seq) in [("p", &p), ("q", &q)] {
            if let Some((k, v)) = seq.iter().enumerate().find(|(_, v)| !in_unit(*v)) {
                return Err(GstError::Invalid(format!("{name}_{} = {v} outside [0, 1]", k + 1)));
            }
        }
        Ok(Self { r, p, q })
    }

    /// Fully symmetric setting: `r = 1/2` and `q = p`.
    pub fn gst(p: Vec<T>) -> Result<Self> {
        Self::new(T::ratio(1, 2), p.clone(), p)
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn is_gst(&self) -> bool {
        self.r == T::ratio(1, 2) && self.p == self.q
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            Err(GstError::IndexOutOfRange { index: i, n: self.n() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        // assignments are packed into a u64 in either mode
        let cap = if T::MODE == crate::scalar::Mode::Exact { ENUMERATION_CAP } else { 63 };
        if self.n() > cap {
            Err(GstError::EnumerationCap { n: self.n(), cap })
        } else {
            Ok(())
        }
    }

    /// Effect probability of player `i` given the full cause assignment.
    pub(crate) fn effect_given_bits(&self, i: usize, bits: u64, zeros: usize) -> T {
        let n = self.n();
        if bits >> i & 1 == 0 {
            self.p[zeros - 1].clone()
        } else {
            self.q[n - zeros - 1].clone()
        }
    }
}

fn in_unit<T: Scalar>(v: &T) -> bool {
    *v >= T::zero() && *v <= T::one()
}

/// A GST probability vector `(p_1, …, p_n)` inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> ProbVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(GstError::Invalid(format!("n must be at least 2, got {}", entries.len())));
        }
        if let Some((k, v)) = entries.iter().enumerate().find(|(_, v)| !in_unit(*v)) {
            return Err(GstError::Invalid(format!("p_{} = {v} outside [0, 1]", k + 1)));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<T> {
        self.entries
    }

    /// The GST game on this vector.
    pub fn spec(&self) -> GameSpec<T> {
        GameSpec { r: T::ratio(1, 2), p: self.entries.clone(), q: self.entries.clone() }
    }
}

impl<T> std::ops::Deref for ProbVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.entries
    }
}

/// Joint outcome of the `n` causes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CauseAssignment {
    bits: Vec<bool>,
}

impl CauseAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_digits(digits: &[u8]) -> Self {
        Self { bits: digits.iter().map(|&d| d != 0).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn zeros(&self) -> usize {
        self.bits.iter().filter(|b| !**b).count()
    }

    fn mask(&self) -> u64 {
        self.bits.iter().enumerate().fold(0, |m, (k, &b)| if b { m | 1 << k } else { m })
    }
}

/// Probability that player `i` fires given all causes.
pub fn effect_prob<T: Scalar>(spec: &GameSpec<T>, i: usize, x: &CauseAssignment) -> Result<T> {
    spec.check_index(i)?;
    if x.len() != spec.n() {
        return Err(GstError::DimensionMismatch { expected: spec.n(), got: x.len() });
    }
    Ok(spec.effect_given_bits(i, x.mask(), x.zeros()))
}

/// A partial assignment: `(cause index, state)` pairs.
pub type Conditions = [(usize, bool)];

/// Conditional effect probabilities under a partial cause assignment.
#[derive(Debug, Clone)]
pub struct ConditionalMoments<T> {
    /// `P(conditions)`.
    pub weight: T,
    /// `P(E_i | conditions)`.
    pub effect: Vec<T>,
    /// `P(E_i ∧ E_j | conditions)` for `i != j`; the diagonal holds `P(E_i | ·)`.
    pub joint: Matrix<T>,
}

/// Enumerates every cause assignment consistent with `conditions` and
/// accumulates effect and pairwise-joint probabilities.
pub fn conditional_moments<T: Scalar>(
    spec: &GameSpec<T>,
    conditions: &Conditions,
) -> Result<ConditionalMoments<T>> {
    spec.check_cap()?;
    let n = spec.n();
    let (mut fixed_mask, mut fixed_val) = (0u64, 0u64);
    for &(k, state) in conditions {
        spec.check_index(k)?;
        if fixed_mask >> k & 1 == 1 {
            return Err(GstError::Invalid(format!("cause {k} conditioned twice")));
        }
        fixed_mask |= 1 << k;
        if state {
            fixed_val |= 1 << k;
        }
    }

    let r = spec.r.clone();
    let one_minus_r = T::one() - r.clone();
    let pow_r: Vec<T> = (0..=n as u32).map(|e| r.pow_u(e)).collect();
    let pow_s: Vec<T> = (0..=n as u32).map(|e| one_minus_r.pow_u(e)).collect();

    let mut weight = T::zero();
    let mut eff = vec![T::zero(); n];
    let mut joint = Matrix::<T>::zeros(n, n);
    let mut e = vec![T::zero(); n];
    for bits in 0u64..1 << n {
        if bits & fixed_mask != fixed_val {
            continue;
        }
        let ones = bits.count_ones() as usize;
        let zeros = n - ones;
        let w = pow_r[ones].clone() * pow_s[zeros].clone();
        for (i, ei) in e.iter_mut().enumerate() {
            *ei = spec.effect_given_bits(i, bits, zeros);
        }
        weight = weight + w.clone();
        for i in 0..n {
            if e[i].is_zero() {
                continue;
            }
            let wi = w.clone() * e[i].clone();
            eff[i] = eff[i].clone() + wi.clone();
            for j in i + 1..n {
                let v = joint[(i, j)].clone() + wi.clone() * e[j].clone();
                joint[(i, j)] = v;
            }
        }
    }
    if weight.is_zero() {
        return Err(GstError::ZeroProbabilityCondition);
    }
    let effect: Vec<T> = eff.into_iter().map(|v| v / weight.clone()).collect();
    let joint = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => joint[(i, j)].clone() / weight.clone(),
        std::cmp::Ordering::Greater => joint[(j, i)].clone() / weight.clone(),
        std::cmp::Ordering::Equal => effect[i].clone(),
    });
    Ok(ConditionalMoments { weight, effect, joint })
}

/// `P(E_i)` by summing over all `2^n` cause assignments.
pub fn marginal_effect<T: Scalar>(spec: &GameSpec<T>, i: usize) -> Result<T> {
    spec.check_index(i)?;
    Ok(conditional_moments(spec, &[])?.effect[i].clone())
}

/// Binomial closed form of `P(E_i)` in the GST setting:
/// `2^{-(n-1)} Σ_k C(n-1, k) p_{k+1}`.
pub fn gst_marginal_closed_form<T: Scalar>(p: &[T]) -> T {
    let n = p.len() as i64;
    let s = p
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, pk)| acc + binom_s::<T>(n - 1, k as i64) * pk.clone());
    s / pow2::<T>((n - 1) as u32)
}

/// `P(E_i ∧ E_j | C_k = x)`.
pub fn pair_prob_given_cause<T: Scalar>(
    spec: &GameSpec<T>,
    i: usize,
    j: usize,
    k: usize,
    x: bool,
) -> Result<T> {
    spec.check_index(i)?;
    spec.check_index(j)?;
    if i == j {
        return Err(GstError::Invalid("pair probability needs distinct effects".into()));
    }
    Ok(conditional_moments(spec, &[(k, x)])?.joint[(i, j)].clone())
}

/// `P(E_i ∧ E_j | S) − P(E_i | S)·P(E_j | S)` for a partial assignment `S`.
pub fn screening_residual<T: Scalar>(
    spec: &GameSpec<T>,
    i: usize,
    j: usize,
    conditions: &Conditions,
) -> Result<T> {
    spec.check_index(i)?;
    spec.check_index(j)?;
    if i == j {
        return Err(GstError::Invalid("screening residual needs distinct effects".into()));
    }
    let m = conditional_moments(spec, conditions)?;
    Ok(residual_of(&m, i, j))
}

pub fn residual_of<T: Scalar>(m: &ConditionalMoments<T>, i: usize, j: usize) -> T {
    m.joint[(i, j)].clone() - m.effect[i].clone() * m.effect[j].clone()
}

/// `(i, j, k, x, residual)`.
pub type SingleCauseResidual<T> = (usize, usize, usize, bool, T);

/// All single-cause residuals `(i, j, k, x)` with `i < j`.
pub fn single_cause_residuals<T: Scalar>(spec: &GameSpec<T>) -> Result<Vec<SingleCauseResidual<T>>> {
    let n = spec.n();
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for x in [false, true] {
            let m = conditional_moments(spec, &[(k, x)])?;
            for i in 0..n {
                for j in i + 1..n {
                    out.push((i, j, k, x, residual_of(&m, i, j)));
                }
            }
        }
    }
    Ok(out)
}

/// JSON form of a [`GameSpec`]: rationals as `"num/den"` strings, or plain
/// numbers when `mode` is `"float"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GameSpecFile {
    pub n: usize,
    pub r: serde_json::Value,
    pub p: Vec<serde_json::Value>,
    pub q: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<crate::scalar::Mode>,
}

impl GameSpecFile {
    pub fn to_spec<T: Scalar>(&self) -> Result<GameSpec<T>> {
        if self.p.len() != self.n {
            return Err(GstError::DimensionMismatch { expected: self.n, got: self.p.len() });
        }
        let r = crate::io::scalar_from_json::<T>(&self.r)?;
        let p = self.p.iter().map(crate::io::scalar_from_json::<T>).collect::<Result<_>>()?;
        let q = self.q.iter().map(crate::io::scalar_from_json::<T>).collect::<Result<_>>()?;
        GameSpec::new(r, p, q)
    }

    pub fn from_spec<T: Scalar>(spec: &GameSpec<T>) -> Self {
        let mode = (T::MODE == crate::scalar::Mode::Float).then_some(T::MODE);
        Self {
            n: spec.n(),
            r: crate::io::scalar_to_json(&spec.r),
            p: spec.p.iter().map(crate::io::scalar_to_json).collect(),
            q: spec.q.iter().map(crate::io::scalar_to_json).collect(),
            mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn tequila() -> GameSpec<Rational> {
        GameSpec::gst(vec![q(1, 1), q(1, 2), q(1, 3)]).unwrap()
    }

    #[test]
    fn effect_prob_examples() {
        let s = tequila();
        let x = CauseAssignment::from_digits(&[0, 1, 1]);
        assert_eq!(effect_prob(&s, 0, &x).unwrap(), q(1, 1));
        let x = CauseAssignment::from_digits(&[0, 0, 0]);
        assert_eq!(effect_prob(&s, 0, &x).unwrap(), q(1, 3));
        // player 2 holds the odd hand out
        let x = CauseAssignment::from_digits(&[0, 1, 0]);
        assert_eq!(effect_prob(&s, 1, &x).unwrap(), q(1, 1));
        assert!(effect_prob(&s, 3, &x).is_err());
        assert!(effect_prob(&s, 0, &CauseAssignment::from_digits(&[0, 1])).is_err());
    }

    #[test]
    fn effect_prob_constant() {
        let c = q(2, 7);
        let s = GameSpec::new(q(1, 3), vec![c.clone(); 4], vec![c.clone(); 4]).unwrap();
        for bits in 0..16u8 {
            let x = CauseAssignment::from_digits(&[bits & 1, bits >> 1 & 1, bits >> 2 & 1, bits >> 3 & 1]);
            for i in 0..4 {
                assert_eq!(effect_prob(&s, i, &x).unwrap(), c);
            }
        }
    }

    #[test]
    fn general_spec_uses_q_for_state_one() {
        let s = GameSpec::new(q(1, 4), vec![q(1, 2), q(1, 3)], vec![q(1, 5), q(1, 7)]).unwrap();
        // x = (1, 0): player 1 has one "one" -> q_1; player 2 has one zero -> p_1
        let x = CauseAssignment::from_digits(&[1, 0]);
        assert_eq!(effect_prob(&s, 0, &x).unwrap(), q(1, 5));
        assert_eq!(effect_prob(&s, 1, &x).unwrap(), q(1, 2));
        let x = CauseAssignment::from_digits(&[1, 1]);
        assert_eq!(effect_prob(&s, 0, &x).unwrap(), q(1, 7));
        assert!(!s.is_gst());
        assert!(tequila().is_gst());
    }

    #[test]
    fn marginal_tequila_is_seven_twelfths() {
        // hand count: 1/4·1 + 1/2·1/2 + 1/4·1/3
        let s = tequila();
        for i in 0..3 {
            assert_eq!(marginal_effect(&s, i).unwrap(), q(7, 12));
        }
        assert_eq!(gst_marginal_closed_form(s.p()), q(7, 12));
    }

    #[test]
    fn marginal_constant() {
        let c = q(3, 11);
        let s = GameSpec::gst(vec![c.clone(); 5]).unwrap();
        assert_eq!(marginal_effect(&s, 2).unwrap(), c);
    }

    #[test]
    fn marginal_boundary_point_n4() {
        // (1, 0, 0, p4) with p4 = 1/(√8 − 1), float mode
        let p4 = 1.0 / (8f64.sqrt() - 1.0);
        let s = GameSpec::<f64>::gst(vec![1.0, 0.0, 0.0, p4]).unwrap();
        let m = marginal_effect(&s, 0).unwrap();
        assert!((m - (1.0 + p4) / 8.0).abs() < 1e-15);
        // boundary family with a rational last coordinate also matches exactly
        let s = GameSpec::gst(vec![q(1, 1), q(0, 1), q(0, 1), q(2, 5)]).unwrap();
        assert_eq!(marginal_effect(&s, 3).unwrap(), (q(1, 1) + q(2, 5)) / q(8, 1));
    }

    #[test]
    fn pair_probabilities() {
        let s = tequila();
        assert_eq!(pair_prob_given_cause(&s, 0, 1, 0, false).unwrap(), q(49, 144));
        assert_eq!(pair_prob_given_cause(&s, 1, 0, 2, true).unwrap(), q(49, 144));
        assert!(pair_prob_given_cause(&s, 1, 1, 0, true).is_err());

        let c = q(5, 9);
        let s = GameSpec::gst(vec![c.clone(); 4]).unwrap();
        assert_eq!(pair_prob_given_cause(&s, 0, 3, 1, true).unwrap(), c.clone() * c);

        let p4 = 1.0 / (8f64.sqrt() - 1.0);
        let s = GameSpec::<f64>::gst(vec![1.0, 0.0, 0.0, p4]).unwrap();
        let pair = pair_prob_given_cause(&s, 0, 1, 0, false).unwrap();
        let m = marginal_effect(&s, 0).unwrap();
        assert!((pair - m * m).abs() < 1e-15);
    }

    #[test]
    fn screening_tequila() {
        let s = tequila();
        assert_eq!(screening_residual(&s, 0, 1, &[(2, false)]).unwrap(), q(0, 1));
        let two = screening_residual(&s, 0, 1, &[(1, false), (2, false)]).unwrap();
        assert_ne!(two, q(0, 1));
        // given C2 = C3 = 0: E1 fires w.p. 1/3 or 1/2 depending on C1, E2 correlated with it
        assert!(screening_residual(&s, 0, 1, &[(1, false), (1, true)]).is_err());
    }

    #[test]
    fn empty_and_single_cause_conditioning_agree_in_gst() {
        let s = GameSpec::gst(vec![q(1, 2), q(1, 5), q(7, 8), q(1, 3)]).unwrap();
        let base = screening_residual(&s, 0, 2, &[]).unwrap();
        for k in 0..4 {
            for x in [false, true] {
                assert_eq!(screening_residual(&s, 0, 2, &[(k, x)]).unwrap(), base);
            }
        }
    }

    #[test]
    fn zero_probability_condition_detected() {
        // conditions are never impossible with 0 < r < 1; a contradictory
        // pair is rejected before enumeration
        let s = tequila();
        assert!(matches!(
            screening_residual(&s, 0, 1, &[(0, true), (0, true)]),
            Err(GstError::Invalid(_))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(GameSpec::new(q(0, 1), vec![q(1, 2); 3], vec![q(1, 2); 3]).is_err());
        assert!(GameSpec::new(q(1, 2), vec![q(3, 2); 3], vec![q(1, 2); 3]).is_err());
        assert!(GameSpec::new(q(1, 2), vec![q(1, 2); 3], vec![q(1, 2); 2]).is_err());
        assert!(GameSpec::new(q(1, 2), vec![q(1, 2); 1], vec![q(1, 2); 1]).is_err());
    }

    #[test]
    fn enumeration_cap_enforced_in_exact_mode() {
        let s = GameSpec::gst(vec![q(1, 2); ENUMERATION_CAP + 1]).unwrap();
        assert!(matches!(marginal_effect(&s, 0), Err(GstError::EnumerationCap { .. })));
    }

    #[test]
    fn spec_file_round_trip() {
        let s = tequila();
        let f = GameSpecFile::from_spec(&s);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"n":3,"r":"1/2","p":["1","1/2","1/3"],"q":["1","1/2","1/3"]}"#);
        let back: GameSpecFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_spec::<Rational>().unwrap(), s);
    }
}
