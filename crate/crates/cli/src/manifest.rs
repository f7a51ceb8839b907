use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Cli;

/// Provenance attached to every report. The digest covers the parsed
/// configuration (not the output path), so equal runs share it.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config_digest: String,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub wall_time_ms: f64,
}

pub fn config_digest(cli: &Cli) -> String {
    let canonical = serde_json::to_string(cli).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

impl RunManifest {
    pub fn new(cli: &Cli, command_line: Vec<String>, elapsed: Duration) -> Self {
        Self {
            command_line,
            config_digest: config_digest(cli),
            seeds: vec![cli.seed],
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: elapsed.as_secs_f64() * 1e3,
        }
    }
}
