use std::path::Path;

use gst_core::geometry::{
    component_label, contraction, eigen_frame, path_probe, segment_classify, surface_sample, PathParams, ProbeOutcome,
};
use gst_core::io::{parse_list, scalar_to_json, vector_to_json};
use gst_core::model::{marginal_effect, GameSpec, GameSpecFile};
use gst_core::points::{boundary_point, f_eval, involution, membership, theta_point, theta_roots, AlgebraicPoint, PointFile};
use gst_core::quadform::{inertia_of_h, matrix_dump, psi, Inertia};
use gst_core::sim::{simulate, SimConfig};
use gst_core::{GstError, Mode, Rational, Scalar};
use serde_json::{json, Value};

use crate::output::{Report, Table};
use crate::{Cli, Command, Failure, Family, Method, PointArg};

type Out = Result<Report, Failure>;

/// Largest `n` for which `simulate` also reports exact marginals.
const EXACT_ORACLE_MAX_N: usize = 16;

macro_rules! by_mode {
    ($mode:expr, $f:ident($($arg:expr),*)) => {
        match $mode {
            Mode::Exact => $f::<Rational>($($arg),*),
            Mode::Float => $f::<f64>($($arg),*),
        }
    };
}

fn to_value<S: serde::Serialize>(v: &S) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Io(e.to_string()))
}

fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D, Failure> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| GstError::Parse(format!("{}: {e}", path.display())).into())
}

fn load_point<T: Scalar>(arg: &PointArg) -> Result<Vec<T>, Failure> {
    match (&arg.inline, &arg.file) {
        (Some(s), None) => Ok(parse_list(s)?),
        (None, Some(path)) => Ok(read_json::<PointFile>(path)?.to_vector()?),
        _ => Err(GstError::Invalid("give exactly one of -p/--point and --file".into()).into()),
    }
}

fn reprs<T: Scalar>(p: &[T]) -> Vec<String> {
    p.iter().map(Scalar::to_repr).collect()
}

fn coord_header(first: &[&str], n: usize, last: &[&str]) -> Table {
    let mut cols: Vec<String> = first.iter().map(|s| s.to_string()).collect();
    cols.extend((1..=n).map(|i| format!("p{i}")));
    cols.extend(last.iter().map(|s| s.to_string()));
    Table { header: cols, rows: Vec::new() }
}

pub fn run(cli: &Cli) -> Out {
    let tol = cli.tol;
    match &cli.command {
        Command::Check { point } => by_mode!(cli.mode, check(point, tol)),
        Command::Find { n, family, count, radius } => find(cli, *n, *family, *count, *radius),
        Command::Inertia { n, method } => inertia(*n, *method),
        Command::Hessian { n } => hessian(*n),
        Command::Ftheta { n, roots, emit_grid, points, width } => {
            let mut result = json!({"n": n});
            let mut table = None;
            if *emit_grid {
                let (grid, t) = by_mode!(cli.mode, ftheta_grid(*n, *points))?;
                result["grid"] = grid;
                table = Some(t);
            }
            if *roots || !*emit_grid {
                let found = theta_roots(*n, *width)?;
                let mut t = Table::new(&["lo", "hi", "exact", "value"]);
                for r in &found {
                    let exact = r.exact.as_ref().map(Scalar::to_repr).unwrap_or_default();
                    t.push(vec![r.lo.to_repr(), r.hi.to_repr(), exact, r.value.to_string()]);
                }
                result["roots"] = to_value(&found)?;
                table.get_or_insert(t);
            }
            let mut report = Report::json(result);
            report.table = table;
            Ok(report)
        }
        Command::Segment { p, q, samples } => by_mode!(cli.mode, segment(p, q, *samples, tol)),
        Command::Path { p, q, boundary, budget, step } => path(cli, p.as_deref(), q.as_deref(), *boundary, *budget, *step),
        Command::Component { point } => by_mode!(cli.mode, component(point, tol)),
        Command::Simulate { spec, point, rounds, chunk } => {
            by_mode!(cli.mode, simulate_cmd(spec.as_deref(), point.as_deref(), *rounds, *chunk, cli.seed))
        }
        Command::Homotopy { point, target, steps } => by_mode!(cli.mode, homotopy(point, target, *steps, tol)),
    }
}

fn check<T: Scalar>(point: &PointArg, tol: f64) -> Out {
    let p = load_point::<T>(point)?;
    let report = membership(&p, tol);
    let mut table = Table::new(&["field", "value"]);
    for (k, v) in report.to_json().as_object().expect("object") {
        table.push(vec![k.clone(), v.to_string()]);
    }
    Ok(Report::json(report.to_json()).with_table(table))
}

fn algebraic_json(b: &AlgebraicPoint) -> Result<Value, Failure> {
    let v = b.verify()?;
    Ok(json!({
        "point": to_value(&b.to_point_file())?,
        "certificate_valid": v.certificate_valid,
        "in_box": v.in_box,
        "psi_zero": v.psi_zero,
        "psi_float": v.psi_float,
        "in_inf": v.in_inf,
        "influence_witness": v.influence_witness,
        "in_gst": v.in_gst,
    }))
}

fn find(cli: &Cli, n: usize, family: Family, count: usize, radius: f64) -> Out {
    match family {
        Family::Theta => {
            let mut points = Vec::new();
            let mut table = coord_header(&["theta"], n, &["in_gst"]);
            for r in theta_roots(n, 1e-12)? {
                let (theta, report) = match (&r.exact, cli.mode) {
                    (Some(t), Mode::Exact) => (json!(t.to_repr()), membership(theta_point(n, t)?.entries(), cli.tol).to_json()),
                    _ => (json!(r.value), membership(theta_point(n, &r.value)?.entries(), cli.tol).to_json()),
                };
                let mut row = vec![theta.to_string().trim_matches('"').to_string()];
                row.extend(report["p"].as_array().expect("array").iter().map(|v| v.to_string().trim_matches('"').to_string()));
                row.push(report["in_gst"].to_string());
                table.push(row);
                points.push(json!({"theta": theta, "exact": r.exact.is_some(), "membership": report}));
            }
            Ok(Report::json(json!({"n": n, "family": "theta", "points": points})).with_table(table))
        }
        Family::Boundary => {
            let b = boundary_point(n)?;
            let partner = b.involution();
            let mut table = coord_header(&["which"], n, &[]);
            for (name, pt) in [("point", &b), ("involution", &partner)] {
                let mut row = vec![name.to_string()];
                row.extend(pt.to_f64().iter().map(f64::to_string));
                table.push(row);
            }
            let result = json!({
                "n": n,
                "family": "boundary",
                "boundary": algebraic_json(&b)?,
                "involution": algebraic_json(&partner)?,
            });
            Ok(Report::json(result).with_table(table))
        }
        Family::Surface => {
            let frame = eigen_frame(n)?;
            let sample = surface_sample(&frame, count, radius, cli.seed)?;
            let mut table = coord_header(&[], n, &["psi", "in_gst"]);
            let mut points = Vec::new();
            for p in &sample.points {
                let m = membership(p, cli.tol);
                let mut row: Vec<String> = p.iter().map(f64::to_string).collect();
                row.extend([m.psi_value.to_string(), m.in_gst.to_string()]);
                table.push(row);
                points.push(json!({"p": p, "psi": m.psi_value, "in_gst": m.in_gst}));
            }
            let result = json!({
                "n": n,
                "family": "surface",
                "seed": sample.seed,
                "radius": radius,
                "attempts": sample.attempts,
                "acceptance_rate": sample.acceptance_rate(),
                "points": points,
            });
            Ok(Report::json(result).with_table(table))
        }
    }
}

fn inertia_row(method: &str, i: &Inertia) -> Vec<String> {
    vec![method.into(), i.n_pos.to_string(), i.n_neg.to_string(), i.n_zero.to_string()]
}

fn inertia(n: usize, method: Method) -> Out {
    let rep = inertia_of_h(n)?;
    let mut table = Table::new(&["method", "n_pos", "n_neg", "n_zero"]);
    let ldl = json!({"inertia": rep.inertia, "perturbed": rep.perturbed, "epsilon": rep.epsilon, "halvings": rep.halvings});
    let eigen = json!({"inertia": rep.eigen, "eigenvalues": rep.eigenvalues});
    let result = match method {
        Method::Ldl => {
            table.push(inertia_row("ldl", &rep.inertia));
            json!({"n": n, "inertia": rep.inertia, "ldl": ldl})
        }
        Method::Eigen => {
            table.push(inertia_row("eigen", &rep.eigen));
            json!({"n": n, "inertia": rep.eigen, "eigen": eigen})
        }
        Method::Both => {
            table.push(inertia_row("ldl", &rep.inertia));
            table.push(inertia_row("eigen", &rep.eigen));
            json!({"n": n, "inertia": rep.inertia, "agree": rep.inertia == rep.eigen, "ldl": ldl, "eigen": eigen})
        }
    };
    Ok(Report::json(result).with_table(table))
}

fn hessian(n: usize) -> Out {
    let dump = matrix_dump(n)?;
    let mut table = Table { header: (1..=n).map(|j| format!("c{j}")).collect(), rows: Vec::new() };
    for row in &dump.h {
        table.push(row.clone());
    }
    Ok(Report::json(to_value(&dump)?).with_table(table))
}

fn ftheta_grid<T: Scalar>(n: usize, points: usize) -> Result<(Value, Table), Failure> {
    if points < 2 {
        return Err(GstError::Invalid("grid needs at least 2 points".into()).into());
    }
    let last = (points - 1) as i64;
    let mut table = Table::new(&["theta", "f"]);
    let mut values = Vec::with_capacity(points);
    for k in 0..=last {
        let theta = T::ratio(k, last);
        let f = f_eval(n, &theta)?;
        table.push(vec![theta.to_f64().to_string(), f.to_f64().to_string()]);
        values.push(json!({"theta": scalar_to_json(&theta), "f": scalar_to_json(&f)}));
    }
    Ok((Value::Array(values), table))
}

fn segment<T: Scalar>(p: &str, q: &str, samples: usize, tol: f64) -> Out {
    let (p, q) = (parse_list::<T>(p)?, parse_list::<T>(q)?);
    let report = segment_classify(&p, &q, samples, tol)?;
    let mut table = Table::new(&["class", "cross_term", "failures"]);
    table.push(vec![format!("{:?}", report.class), report.cross_term.clone(), report.failures.len().to_string()]);
    Ok(Report::json(to_value(&report)?).with_table(table))
}

fn path(cli: &Cli, p: Option<&str>, q: Option<&str>, boundary: Option<usize>, budget: usize, step: f64) -> Out {
    let (p, q) = match (boundary, p, q) {
        (Some(n), _, _) => {
            let b = boundary_point(n)?;
            (b.to_f64(), b.involution().to_f64())
        }
        (None, Some(p), Some(q)) => (parse_list::<f64>(p)?, parse_list::<f64>(q)?),
        _ => return Err(GstError::Invalid("give -p and -q, or --boundary N".into()).into()),
    };
    let params = PathParams { seed: cli.seed, budget, step, ..PathParams::default() };
    let outcome = path_probe(&p, &q, &params)?;
    let mut result = to_value(&outcome)?;
    let mut report = Report::json(Value::Null);
    match &outcome {
        ProbeOutcome::Path(sp) => {
            result["trailer"] = sp.trailer();
            let mut table = coord_header(&["i"], sp.n, &["psi"]);
            for (i, w) in sp.waypoints.iter().enumerate() {
                let mut row = vec![i.to_string()];
                row.extend(w.iter().map(f64::to_string));
                row.push(psi(w).to_string());
                table.push(row);
            }
            report.table = Some(table);
        }
        ProbeOutcome::Disconnected(_) => {}
        ProbeOutcome::TimedOut { .. } => report.exit = 4,
    }
    report.result = result;
    Ok(report)
}

fn component<T: Scalar>(point: &PointArg, tol: f64) -> Out {
    let p = load_point::<T>(point)?;
    let frame = eigen_frame(p.len())?;
    let label = component_label(&frame, &p, tol)?;
    let partner = component_label(&frame, &involution(&p), tol)?;
    let mut table = Table::new(&["n", "k", "l", "label", "involution_label"]);
    table.push(vec![
        frame.n.to_string(),
        frame.k.to_string(),
        frame.l.to_string(),
        label.sign.to_string(),
        partner.sign.to_string(),
    ]);
    let result = json!({
        "n": frame.n,
        "k": frame.k,
        "l": frame.l,
        "p": vector_to_json(&p),
        "label": label.sign,
        "involution_label": partner.sign,
    });
    Ok(Report::json(result).with_table(table))
}

fn simulate_cmd<T: Scalar>(spec: Option<&Path>, point: Option<&str>, rounds: u64, chunk: u64, seed: u64) -> Out {
    let spec: GameSpec<T> = match (spec, point) {
        (Some(path), None) => read_json::<GameSpecFile>(path)?.to_spec()?,
        (None, Some(p)) => GameSpec::gst(parse_list(p)?)?,
        _ => return Err(GstError::Invalid("give exactly one of --spec and -p".into()).into()),
    };
    let config = SimConfig::new(&spec, rounds, seed, chunk)?;
    let report = simulate(&config);
    let mut result = report.to_json();
    if spec.n() <= EXACT_ORACLE_MAX_N {
        let exact = (0..spec.n()).map(|i| marginal_effect(&spec, i).map(|v| scalar_to_json(&v))).collect::<Result<Vec<_>, _>>()?;
        result["exact_effect"] = Value::Array(exact);
    }
    let mut table = Table::new(&["i", "count", "freq", "se"]);
    for i in 0..report.n() {
        table.push(vec![
            (i + 1).to_string(),
            report.counts.effect[i].to_string(),
            report.effect_freq(i).to_string(),
            report.effect_se(i).to_string(),
        ]);
    }
    Ok(Report::json(result).with_table(table))
}

fn homotopy<T: Scalar>(point: &PointArg, target: &str, steps: usize, tol: f64) -> Out {
    if steps == 0 {
        return Err(GstError::Invalid("steps must be at least 1".into()).into());
    }
    let p = load_point::<T>(point)?;
    let c = T::parse_repr(target)?;
    let x = vec![c; p.len()];
    let mut table = coord_header(&["t"], p.len(), &["psi", "in_ind", "in_inf"]);
    let mut frames = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = T::ratio(k as i64, steps as i64);
        let pt = contraction(&p, &t, &x, tol)?;
        let m = membership(&pt, tol);
        let mut row = vec![t.to_repr()];
        row.extend(reprs(&pt));
        row.extend([m.psi_value.to_repr(), m.in_ind.to_string(), m.in_inf.to_string()]);
        table.push(row);
        frames.push(json!({
            "t": scalar_to_json(&t),
            "p": vector_to_json(&pt),
            "psi": scalar_to_json(&m.psi_value),
            "in_ind": m.in_ind,
            "in_inf": m.in_inf,
        }));
    }
    Ok(Report::json(json!({"n": p.len(), "target": scalar_to_json(&x[0]), "frames": frames})).with_table(table))
}
