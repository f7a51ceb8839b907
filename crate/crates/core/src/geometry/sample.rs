use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::EigenFrame;
use crate::error::{GstError, Result};
use crate::points::{influence_margin, FLOAT_TOL};
use crate::quadform::psi;
use crate::rng::SplitMix64;

/// Accepted attempts per requested point before giving up.
const ATTEMPTS_PER_POINT: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub points: Vec<Vec<f64>>,
    pub attempts: usize,
    pub seed: u64,
}

impl SampleReport {
    pub fn acceptance_rate(&self) -> f64 {
        self.points.len() as f64 / self.attempts.max(1) as f64
    }
}

/// A uniformly random unit vector in `dim` dimensions.
pub(crate) fn random_direction(rng: &mut SplitMix64, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random points of `GST_n` near `m`: a free kernel coordinate in
/// `(−radius, radius)`, and random directions in the positive and negative
/// blocks scaled so both weighted block norms equal a common random `t`.
pub fn surface_sample(frame: &EigenFrame, count: usize, radius: f64, seed: u64) -> Result<SampleReport> {
    if !(radius > 0.0) || radius >= 0.5 {
        return Err(GstError::Invalid(format!("radius must lie in (0, 1/2), got {radius}")));
    }
    if frame.k == 0 || frame.l == 0 {
        return Err(GstError::NotApplicable("form is semidefinite".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let lambda_min = frame.d[1..].iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0;
    while points.len() < count {
        if attempts >= ATTEMPTS_PER_POINT * count.max(1) {
            return Err(GstError::Numerical(format!(
                "surface sampler accepted {} of {count} points in {attempts} attempts",
                points.len()
            )));
        }
        attempts += 1;
        let t = rng.random::<f64>() * radius * radius * lambda_min;
        let mut y = vec![0.0; frame.n];
        y[0] = (2.0 * rng.random::<f64>() - 1.0) * radius;
        for block in [frame.positive(), frame.negative()] {
            let u = random_direction(&mut rng, block.len());
            let weighted: f64 = u.iter().zip(&frame.d[block.clone()]).map(|(v, d)| d.abs() * v * v).sum();
            let s = (t / weighted).sqrt();
            for (c, v) in block.zip(u) {
                y[c] = s * v;
            }
        }
        let p = frame.from_eigen(&y);
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) || influence_margin(&p) <= FLOAT_TOL {
            continue;
        }
        if psi(&p).abs() > 1e-9 {
            return Err(GstError::Numerical(format!("sampled point has |ψ| = {:e}", psi(&p).abs())));
        }
        points.push(p);
    }
    Ok(SampleReport { points, attempts, seed })
}
