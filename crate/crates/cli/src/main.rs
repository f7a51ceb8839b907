//! `gst`: command-line front end for gst-core.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gst_core::{GstError, Mode};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::Format;

#[derive(Debug, Parser, Serialize)]
#[command(name = "gst", version, about = "Influence and pairwise independence in the GST model")]
pub struct Cli {
    /// Arithmetic: exact rationals or f64.
    #[arg(long, global = true, default_value = "exact", value_parser = parse_mode)]
    pub mode: Mode,

    /// Zero band for float comparisons.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: GstError| e.to_string())
}

/// A probability vector given inline or as a point file.
#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct PointArg {
    /// Comma separated entries, e.g. `1,1/2,1/3`.
    #[arg(short = 'p', long = "point", allow_hyphen_values = true)]
    pub inline: Option<String>,

    /// JSON point file `{"n": .., "p": [..]}`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Theta,
    Boundary,
    Surface,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ldl,
    Eigen,
    Both,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Membership of a point in Ind_n, Inf_n and GST_n.
    Check {
        #[command(flatten)]
        point: PointArg,
    },
    /// Explicit points of GST_n.
    Find {
        n: usize,
        #[arg(long, value_enum, default_value = "theta")]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Sampling radius around m (surface family).
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
    },
    /// Inertia of the Hessian of ψ.
    Inertia {
        n: usize,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// Exact Hessian and scaled X matrix.
    Hessian { n: usize },
    /// Values or roots of f(θ).
    Ftheta {
        n: usize,
        #[arg(long)]
        roots: bool,
        #[arg(long)]
        emit_grid: bool,
        /// Grid points on [0, 1].
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Root bracket width.
        #[arg(long, default_value_t = 1e-12)]
        width: f64,
    },
    /// Classify the segment between two GST points.
    Segment {
        #[arg(short = 'p', allow_hyphen_values = true)]
        p: String,
        #[arg(short = 'q', allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Search for an on-surface path between two GST points.
    Path {
        #[arg(short = 'p', allow_hyphen_values = true, required_unless_present = "boundary")]
        p: Option<String>,
        #[arg(short = 'q', allow_hyphen_values = true, required_unless_present = "boundary")]
        q: Option<String>,
        /// Use the boundary point of this n and its involution as endpoints.
        #[arg(long, conflicts_with_all = ["p", "q"])]
        boundary: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Component label of a GST point (n = 3, 4).
    Component {
        #[command(flatten)]
        point: PointArg,
    },
    /// Monte Carlo play of a game.
    Simulate {
        /// Game spec JSON file.
        #[arg(long, required_unless_present = "point")]
        spec: Option<PathBuf>,
        /// GST vector instead of a spec file.
        #[arg(short = 'p', long, conflicts_with = "spec", allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, default_value_t = 65_536)]
        chunk: u64,
    },
    /// Contraction of a point of Ind_n to a constant vector.
    Homotopy {
        #[command(flatten)]
        point: PointArg,
        /// Value of the constant target vector.
        #[arg(long, default_value = "1/2")]
        target: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

/// Reasons a command ends without a normal report.
#[derive(Debug)]
pub enum Failure {
    Gst(GstError),
    Io(String),
}

impl From<GstError> for Failure {
    fn from(e: GstError) -> Self {
        Failure::Gst(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Gst(GstError::Numerical(_) | GstError::Disagreement(_)) => 3,
            Failure::Gst(_) | Failure::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Gst(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let outcome = commands::run(&cli).and_then(|report| {
        let manifest = RunManifest::new(&cli, argv, start.elapsed());
        output::emit(&cli, &report, &manifest)?;
        Ok(report.exit)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gst: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
