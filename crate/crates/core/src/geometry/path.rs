//! Seeded search for paths inside `GST_n`.
//!
//! Endpoints are first pulled towards `m` along their own rays (which stay
//! in `GST_n`). Near `m` a point of the independence cone is described by
//! a kernel coordinate, a radius `ρ`, and unit vectors `u`, `w` in the
//! weighted positive and negative blocks. Legs between such points move `u`
//! and `w` along great circles, so every waypoint is on the cone; each is
//! still retracted (both block norms reset to their geometric mean) and
//! checked. When a leg comes too close to the no-influence subspace the
//! search reroutes through a random anchor.

use serde::Serialize;
use serde_json::{json, Value};

use super::sample::random_direction;
use super::{component_label, eigen_frame, EigenFrame};
use crate::error::{GstError, Result};
use crate::points::{influence_margin, membership};
use crate::quadform::psi;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Serialize)]
pub struct PathParams {
    /// Largest allowed distance between consecutive waypoints.
    pub step: f64,
    /// Total number of waypoint evaluations before giving up.
    pub budget: usize,
    pub seed: u64,
    /// `|ψ|` allowed at a waypoint.
    pub psi_tol: f64,
    /// Required `max_s |x_s − x_{n-s+1}|` at every waypoint.
    pub margin: f64,
    /// Endpoints are scaled towards `m` until within this distance.
    pub shrink_radius: f64,
    /// Membership tolerance for the endpoints.
    pub endpoint_tol: f64,
}

impl Default for PathParams {
    fn default() -> Self {
        Self {
            step: 0.01,
            budget: 100_000,
            seed: 0,
            psi_tol: 1e-6,
            margin: 1e-6,
            shrink_radius: 0.25,
            endpoint_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfacePath {
    pub n: usize,
    pub waypoints: Vec<Vec<f64>>,
    pub max_psi_drift: f64,
    pub min_influence_margin: f64,
    pub max_step: f64,
    pub seed: u64,
    pub attempts: usize,
    pub iterations: usize,
    /// Set for `n ∈ {5, 6, 7}`, where connectivity is an open problem.
    pub experimental: bool,
}

impl SurfacePath {
    fn from_waypoints(n: usize, waypoints: Vec<Vec<f64>>, params: &PathParams, attempts: usize, iterations: usize) -> Self {
        let max_psi_drift = waypoints.iter().map(|p| psi(p).abs()).fold(0.0, f64::max);
        let min_influence_margin = waypoints.iter().map(|p| influence_margin(p)).fold(f64::INFINITY, f64::min);
        let max_step = waypoints.windows(2).map(|w| dist(&w[0], &w[1])).fold(0.0, f64::max);
        Self {
            n,
            waypoints,
            max_psi_drift,
            min_influence_margin,
            max_step,
            seed: params.seed,
            attempts,
            iterations,
            experimental: is_experimental(n),
        }
    }

    /// One JSON object per waypoint, then a trailer with the statistics.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.waypoints.iter().enumerate() {
            let line = json!({"i": i, "p": p, "psi": psi(p), "margin": influence_margin(p)});
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out.push_str(&self.trailer().to_string());
        out.push('\n');
        out
    }

    pub fn trailer(&self) -> Value {
        let mut t = json!({
            "trailer": true,
            "n": self.n,
            "waypoints": self.waypoints.len(),
            "max_psi_drift": self.max_psi_drift,
            "min_influence_margin": self.min_influence_margin,
            "max_step": self.max_step,
            "seed": self.seed,
            "attempts": self.attempts,
            "iterations": self.iterations,
        });
        if self.experimental {
            t["label"] = json!("experimental — open problem");
        }
        t
    }
}

/// The endpoints lie in different components: proof that no path exists.
#[derive(Debug, Clone, Serialize)]
pub struct FailureCertificate {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub label_p: i8,
    pub label_q: i8,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Path(SurfacePath),
    Disconnected(FailureCertificate),
    TimedOut { n: usize, seed: u64, attempts: usize, iterations: usize, experimental: bool },
}

fn is_experimental(n: usize) -> bool {
    (5..=7).contains(&n)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A point of the cone in polar form.
#[derive(Debug, Clone)]
struct ConePoint {
    y0: f64,
    rho: f64,
    u: Vec<f64>,
    w: Vec<f64>,
}

impl ConePoint {
    /// Polar form of `y`, retracted onto the cone.
    fn from_y(frame: &EigenFrame, y: &[f64]) -> Option<Self> {
        let zp: Vec<f64> = frame.positive().map(|c| frame.d[c].sqrt() * y[c]).collect();
        let zn: Vec<f64> = frame.negative().map(|c| (-frame.d[c]).sqrt() * y[c]).collect();
        let (a, b) = (norm(&zp), norm(&zn));
        if a < 1e-14 || b < 1e-14 {
            return None;
        }
        Some(Self {
            y0: y[0],
            rho: (a * b).sqrt(),
            u: zp.into_iter().map(|v| v / a).collect(),
            w: zn.into_iter().map(|v| v / b).collect(),
        })
    }

    fn to_y(&self, frame: &EigenFrame) -> Vec<f64> {
        let mut y = vec![0.0; frame.n];
        y[0] = self.y0;
        for (c, u) in frame.positive().zip(&self.u) {
            y[c] = self.rho * u / frame.d[c].sqrt();
        }
        for (c, w) in frame.negative().zip(&self.w) {
            y[c] = self.rho * w / (-frame.d[c]).sqrt();
        }
        y
    }
}

/// Great-circle interpolation; `None` for (nearly) antipodal ends of a
/// sphere of dimension at least one.
fn slerp(a: &[f64], b: &[f64], s: f64) -> Option<Vec<f64>> {
    let dot = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0);
    if dot < -1.0 + 1e-9 {
        return None;
    }
    let omega = dot.acos();
    if omega < 1e-12 {
        return Some(a.to_vec());
    }
    let (fa, fb) = (((1.0 - s) * omega).sin() / omega.sin(), (s * omega).sin() / omega.sin());
    let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| fa * x + fb * y).collect();
    let r = norm(&v);
    Some(v.into_iter().map(|x| x / r).collect())
}

/// Straight pieces from `a` to `b` with steps at most `step`.
fn straight(a: &[f64], b: &[f64], step: f64) -> Vec<Vec<f64>> {
    let pieces = (dist(a, b) / step).ceil().max(1.0) as usize;
    (0..=pieces)
        .map(|j| {
            let s = j as f64 / pieces as f64;
            a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
        })
        .collect()
}

struct Search<'a> {
    frame: &'a EigenFrame,
    params: &'a PathParams,
    iterations: usize,
}

enum LegError {
    Antipodal,
    Blocked,
    Budget,
}

impl Search<'_> {
    fn accept(&mut self, p: &[f64]) -> std::result::Result<bool, LegError> {
        if self.iterations >= self.params.budget {
            return Err(LegError::Budget);
        }
        self.iterations += 1;
        Ok(p.iter().all(|v| (0.0..=1.0).contains(v))
            && psi(p).abs() <= self.params.psi_tol
            && influence_margin(p) >= self.params.margin)
    }

    /// Waypoints (in `p`-space) from `a` to `b`, both ends included.
    fn leg(&mut self, a: &ConePoint, b: &ConePoint) -> std::result::Result<Vec<Vec<f64>>, LegError> {
        let mut pieces = 8usize;
        loop {
            let mut pts = Vec::with_capacity(pieces + 1);
            for j in 0..=pieces {
                let s = j as f64 / pieces as f64;
                let c = ConePoint {
                    y0: a.y0 + s * (b.y0 - a.y0),
                    rho: a.rho + s * (b.rho - a.rho),
                    u: slerp(&a.u, &b.u, s).ok_or(LegError::Antipodal)?,
                    w: slerp(&a.w, &b.w, s).ok_or(LegError::Antipodal)?,
                };
                let y = c.to_y(self.frame);
                // retraction: idempotent here, but keeps drift from accumulating
                let y = ConePoint::from_y(self.frame, &y).ok_or(LegError::Blocked)?.to_y(self.frame);
                pts.push(self.frame.from_eigen(&y));
            }
            if pts.windows(2).all(|w| dist(&w[0], &w[1]) <= self.params.step) {
                for p in &pts {
                    if !self.accept(p)? {
                        return Err(LegError::Blocked);
                    }
                }
                return Ok(pts);
            }
            pieces *= 2;
            if pieces > self.params.budget {
                return Err(LegError::Budget);
            }
        }
    }

    fn random_anchor(&self, rng: &mut SplitMix64, a: &ConePoint, b: &ConePoint) -> ConePoint {
        let scale = 0.75 + 0.5 * rng.uniform();
        ConePoint {
            y0: 0.5 * (a.y0 + b.y0),
            rho: 0.5 * (a.rho + b.rho) * scale,
            u: random_direction(rng, self.frame.k),
            w: random_direction(rng, self.frame.l),
        }
    }
}

/// Looks for a path from `p` to `q` inside `GST_n`; returns a certificate
/// of disconnection when the component labels differ.
pub fn path_probe(p: &[f64], q: &[f64], params: &PathParams) -> Result<ProbeOutcome> {
    if p.len() != q.len() {
        return Err(GstError::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    if params.step <= 0.0 || params.shrink_radius <= 0.0 {
        return Err(GstError::Invalid("step and shrink radius must be positive".into()));
    }
    let n = p.len();
    for (name, v) in [("p", p), ("q", q)] {
        if !membership(v, params.endpoint_tol).in_gst {
            return Err(GstError::NotInGst(format!("path endpoint {name}")));
        }
    }
    if p == q {
        return Ok(ProbeOutcome::Path(SurfacePath::from_waypoints(n, vec![p.to_vec()], params, 0, 0)));
    }
    let frame = eigen_frame(n)?;
    if frame.k.min(frame.l) == 1 {
        let lp = component_label(&frame, p, params.endpoint_tol)?.sign;
        let lq = component_label(&frame, q, params.endpoint_tol)?.sign;
        if lp != lq {
            return Ok(ProbeOutcome::Disconnected(FailureCertificate { n, k: frame.k, l: frame.l, label_p: lp, label_q: lq }));
        }
    }

    let m = vec![0.5; n];
    let shrink = |v: &[f64]| -> Vec<f64> {
        let c = (params.shrink_radius / dist(v, &m)).min(1.0);
        v.iter().map(|x| 0.5 + c * (x - 0.5)).collect()
    };
    let (ps, qs) = (shrink(p), shrink(q));
    let head = straight(p, &ps, params.step);
    let mut tail = straight(q, &qs, params.step);
    tail.reverse();

    let cone = |v: &[f64]| {
        ConePoint::from_y(&frame, &frame.to_eigen(v))
            .ok_or_else(|| GstError::Numerical("endpoint lies on the cone's singular set".into()))
    };
    let (a, b) = (cone(&ps)?, cone(&qs)?);
    let mut search = Search { frame: &frame, params, iterations: 0 };
    let timed_out = |attempts: usize, iterations: usize| ProbeOutcome::TimedOut {
        n,
        seed: params.seed,
        attempts,
        iterations,
        experimental: is_experimental(n),
    };
    for v in head.iter().chain(&tail) {
        match search.accept(v) {
            Ok(true) => {}
            Ok(false) => return Err(GstError::Numerical("radial segment left GST_n".into())),
            Err(_) => return Ok(timed_out(0, search.iterations)),
        }
    }
    let mut rng = SplitMix64::new(params.seed);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let route = if attempts == 1 {
            vec![a.clone(), b.clone()]
        } else {
            let anchors = 1 + (attempts - 2) % 3;
            let mut r = vec![a.clone()];
            for _ in 0..anchors {
                r.push(search.random_anchor(&mut rng, &a, &b));
            }
            r.push(b.clone());
            r
        };
        let mut middle: Vec<Vec<f64>> = Vec::new();
        let mut failed = None;
        for pair in route.windows(2) {
            match search.leg(&pair[0], &pair[1]) {
                Ok(pts) => {
                    let skip = usize::from(!middle.is_empty());
                    middle.extend(pts.into_iter().skip(skip));
                }
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        match failed {
            None => {
                let mut waypoints = head.clone();
                waypoints.extend(middle.into_iter().skip(1));
                waypoints.extend(tail.iter().skip(1).cloned());
                return Ok(ProbeOutcome::Path(SurfacePath::from_waypoints(n, waypoints, params, attempts, search.iterations)));
            }
            Some(LegError::Budget) => return Ok(timed_out(attempts, search.iterations)),
            Some(LegError::Antipodal | LegError::Blocked) => {}
        }
    }
}
