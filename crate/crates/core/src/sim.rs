//! Monte Carlo play of the general game.
//!
//! Rounds are cut into chunks of `chunk` rounds; chunk `j` draws from
//! `SplitMix64::stream(seed, j)`. Counts are integers, so summing chunks in
//! any order (and on any number of threads) gives identical reports.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{GstError, Result};
use crate::model::GameSpec;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub spec: GameSpec<f64>,
    pub rounds: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl SimConfig {
    pub fn new<T: Scalar>(spec: &GameSpec<T>, rounds: u64, seed: u64, chunk: u64) -> Result<Self> {
        if rounds == 0 || chunk == 0 {
            return Err(GstError::Invalid("rounds and chunk must be at least 1".into()));
        }
        if spec.n() > 63 {
            return Err(GstError::Invalid(format!("simulation supports n <= 63, got {}", spec.n())));
        }
        let to_f = |v: &[T]| v.iter().map(Scalar::to_f64).collect::<Vec<_>>();
        let spec = GameSpec::new(spec.r().to_f64(), to_f(spec.p()), to_f(spec.q()))?;
        Ok(Self { spec, rounds, seed, chunk })
    }
}

/// Integer tallies. Index layout: `effect_given[(i * n + k) * 2 + x]`,
/// `joint_given[((i * n + j) * n + k) * 2 + x]` (only `i < j` filled).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimCounts {
    pub n: usize,
    pub rounds: u64,
    pub effect: Vec<u64>,
    pub cause: Vec<u64>,
    pub effect_given: Vec<u64>,
    pub joint: Vec<u64>,
    pub joint_given: Vec<u64>,
}

impl SimCounts {
    fn zero(n: usize) -> Self {
        Self {
            n,
            rounds: 0,
            effect: vec![0; n],
            cause: vec![0; 2 * n],
            effect_given: vec![0; 2 * n * n],
            joint: vec![0; n * n],
            joint_given: vec![0; 2 * n * n * n],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.rounds += other.rounds;
        for (a, b) in [
            (&mut self.effect, &other.effect),
            (&mut self.cause, &other.cause),
            (&mut self.effect_given, &other.effect_given),
            (&mut self.joint, &other.joint),
            (&mut self.joint_given, &other.joint_given),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        self
    }
}

fn run_chunk(config: &SimConfig, index: u64) -> SimCounts {
    let spec = &config.spec;
    let n = spec.n();
    let start = index * config.chunk;
    let rounds = config.chunk.min(config.rounds - start);
    let mut rng = SplitMix64::stream(config.seed, index);
    let mut c = SimCounts::zero(n);
    c.rounds = rounds;
    let r = *spec.r();
    let mut fired = Vec::with_capacity(n);
    for _ in 0..rounds {
        let mut bits = 0u64;
        for i in 0..n {
            if rng.bernoulli(r) {
                bits |= 1 << i;
            }
        }
        let zeros = n - bits.count_ones() as usize;
        fired.clear();
        for i in 0..n {
            if rng.bernoulli(spec.effect_given_bits(i, bits, zeros)) {
                fired.push(i);
            }
        }
        for k in 0..n {
            c.cause[2 * k + (bits >> k & 1) as usize] += 1;
        }
        for (a, &i) in fired.iter().enumerate() {
            c.effect[i] += 1;
            for k in 0..n {
                c.effect_given[(i * n + k) * 2 + (bits >> k & 1) as usize] += 1;
            }
            for &j in &fired[a + 1..] {
                c.joint[i * n + j] += 1;
                for k in 0..n {
                    c.joint_given[((i * n + j) * n + k) * 2 + (bits >> k & 1) as usize] += 1;
                }
            }
        }
    }
    c
}

fn chunk_count(config: &SimConfig) -> u64 {
    config.rounds.div_ceil(config.chunk)
}

/// Runs all chunks in parallel.
pub fn simulate(config: &SimConfig) -> SimReport {
    let n = config.spec.n();
    let counts = (0..chunk_count(config))
        .into_par_iter()
        .map(|j| run_chunk(config, j))
        .reduce(|| SimCounts::zero(n), SimCounts::merge);
    SimReport::new(config, counts)
}

/// Same result as [`simulate`] on one thread.
pub fn simulate_serial(config: &SimConfig) -> SimReport {
    let n = config.spec.n();
    let counts = (0..chunk_count(config)).map(|j| run_chunk(config, j)).fold(SimCounts::zero(n), SimCounts::merge);
    SimReport::new(config, counts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub seed: u64,
    pub chunk: u64,
    pub counts: SimCounts,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        f64::NAN
    } else {
        a as f64 / b as f64
    }
}

fn se(f: f64, m: u64) -> f64 {
    (f * (1.0 - f) / m as f64).sqrt()
}

impl SimReport {
    fn new(config: &SimConfig, counts: SimCounts) -> Self {
        Self { seed: config.seed, chunk: config.chunk, counts }
    }

    pub fn n(&self) -> usize {
        self.counts.n
    }

    pub fn rounds(&self) -> u64 {
        self.counts.rounds
    }

    /// `P̂(E_i)`.
    pub fn effect_freq(&self, i: usize) -> f64 {
        ratio(self.counts.effect[i], self.counts.rounds)
    }

    pub fn effect_se(&self, i: usize) -> f64 {
        se(self.effect_freq(i), self.counts.rounds)
    }

    pub fn cause_count(&self, k: usize, x: bool) -> u64 {
        self.counts.cause[2 * k + usize::from(x)]
    }

    /// `P̂(E_i | C_k = x)`.
    pub fn conditional_freq(&self, i: usize, k: usize, x: bool) -> f64 {
        let n = self.n();
        ratio(self.counts.effect_given[(i * n + k) * 2 + usize::from(x)], self.cause_count(k, x))
    }

    pub fn conditional_se(&self, i: usize, k: usize, x: bool) -> f64 {
        se(self.conditional_freq(i, k, x), self.cause_count(k, x))
    }

    /// `P̂(E_i ∧ E_j | C_k = x)`.
    pub fn joint_conditional_freq(&self, i: usize, j: usize, k: usize, x: bool) -> f64 {
        let n = self.n();
        let (a, b) = (i.min(j), i.max(j));
        ratio(self.counts.joint_given[((a * n + b) * n + k) * 2 + usize::from(x)], self.cause_count(k, x))
    }

    pub fn to_json(&self) -> Value {
        let n = self.n();
        let effect: Vec<Value> = (0..n)
            .map(|i| json!({"i": i + 1, "freq": self.effect_freq(i), "se": self.effect_se(i)}))
            .collect();
        let mut conditional = Vec::new();
        let mut joint = Vec::new();
        for k in 0..n {
            for x in [false, true] {
                for i in 0..n {
                    conditional.push(json!({
                        "i": i + 1, "k": k + 1, "x": u8::from(x),
                        "freq": finite(self.conditional_freq(i, k, x)),
                        "se": finite(self.conditional_se(i, k, x)),
                    }));
                    for j in i + 1..n {
                        let z = independence_test(self, i, j, k, x);
                        joint.push(json!({
                            "i": i + 1, "j": j + 1, "k": k + 1, "x": u8::from(x),
                            "freq": finite(self.joint_conditional_freq(i, j, k, x)),
                            "z": z.z, "degenerate": z.degenerate,
                        }));
                    }
                }
            }
        }
        json!({
            "n": n,
            "rounds": self.rounds(),
            "seed": self.seed,
            "chunk": self.chunk,
            "counts": self.counts,
            "effect": effect,
            "conditional": conditional,
            "joint_conditional": joint,
        })
    }
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZScore {
    /// `None` when the cell is degenerate.
    pub z: Option<f64>,
    pub diff: f64,
    pub se: f64,
    pub degenerate: bool,
}

/// `(P̂(E_i ∧ E_j | C_k = x) − P̂(E_i | ·)P̂(E_j | ·)) / SE`, with the
/// standard error from the delta method on the four-cell multinomial.
pub fn independence_test(report: &SimReport, i: usize, j: usize, k: usize, x: bool) -> ZScore {
    let m = report.cause_count(k, x);
    let fi = report.conditional_freq(i, k, x);
    let fj = report.conditional_freq(j, k, x);
    let f11 = report.joint_conditional_freq(i, j, k, x);
    let diff = f11 - fi * fj;
    let degenerate_cell = m == 0 || ![fi, fj].iter().all(|f| *f > 0.0 && *f < 1.0);
    if degenerate_cell {
        return ZScore { z: None, diff: if diff.is_finite() { diff } else { 0.0 }, se: 0.0, degenerate: true };
    }
    let (f10, f01) = (fi - f11, fj - f11);
    let cells = [(f11, 1.0 - fi - fj), (f10, -fj), (f01, -fi)];
    let mean: f64 = cells.iter().map(|(p, g)| p * g).sum();
    let second: f64 = cells.iter().map(|(p, g)| p * g * g).sum();
    let var = (second - mean * mean) / m as f64;
    if !(var > 0.0) {
        return ZScore { z: None, diff, se: 0.0, degenerate: true };
    }
    let se = var.sqrt();
    ZScore { z: Some(diff / se), diff, se, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn spec(p: &[f64]) -> GameSpec<f64> {
        GameSpec::gst(p.to_vec()).unwrap()
    }

    #[test]
    fn zero_spec_never_fires() {
        let c = SimConfig::new(&spec(&[0.0, 0.0, 0.0]), 1000, 1, 128).unwrap();
        let r = simulate(&c);
        assert!(r.counts.effect.iter().all(|&v| v == 0));
        let z = independence_test(&r, 0, 1, 2, false);
        assert!(z.degenerate && z.z.is_none());
    }

    #[test]
    fn parallel_equals_serial() {
        let c = SimConfig::new(&spec(&[1.0, 0.5, 1.0 / 3.0]), 20_000, 5, 777).unwrap();
        assert_eq!(simulate(&c), simulate_serial(&c));
        assert_eq!(simulate(&c), simulate(&c));
        assert_eq!(simulate(&c).rounds(), 20_000);
    }

    #[test]
    fn tequila_marginal_close() {
        let s = GameSpec::<Rational>::gst(vec![
            Rational::from_integer(1.into()),
            Rational::new(1.into(), 2.into()),
            Rational::new(1.into(), 3.into()),
        ])
        .unwrap();
        let c = SimConfig::new(&s, 100_000, 1, 10_000).unwrap();
        let r = simulate(&c);
        let f = r.effect_freq(0);
        assert!((f - 7.0 / 12.0).abs() < 4.0 * r.effect_se(0));
        assert_eq!(r.cause_count(0, false) + r.cause_count(0, true), 100_000);
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(&spec(&[0.5, 0.5]), 0, 1, 1).is_err());
        assert!(SimConfig::new(&spec(&[0.5, 0.5]), 1, 1, 0).is_err());
    }

    #[test]
    fn report_json_has_integer_counts() {
        let c = SimConfig::new(&spec(&[1.0, 0.5, 0.25]), 500, 2, 100).unwrap();
        let v = simulate(&c).to_json();
        assert!(v["counts"]["effect"][0].is_u64());
        assert_eq!(v["rounds"], 500);
    }
}
