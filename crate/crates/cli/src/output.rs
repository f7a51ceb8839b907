use std::fs::File;
use std::io::{self, Write};

use clap::ValueEnum;
use gst_core::GstError;
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::RunManifest;
use crate::{Cli, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flat rows for `--format csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
    pub exit: u8,
}

impl Report {
    pub fn json(result: Value) -> Self {
        Self { result, table: None, exit: 0 }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

fn sink(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

/// JSON: `{"manifest": .., "result": ..}`. CSV: the table, with the
/// manifest written next to the output file (or to stderr).
pub fn emit(cli: &Cli, report: &Report, manifest: &RunManifest) -> Result<(), Failure> {
    match cli.format {
        Format::Json => {
            let mut out = sink(cli)?;
            let doc = json!({"manifest": manifest, "result": report.result});
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Failure::Io(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            let table = report
                .table
                .as_ref()
                .ok_or_else(|| GstError::Invalid("this command has no CSV form; use --format json".into()))?;
            let mut w = csv::Writer::from_writer(sink(cli)?);
            w.write_record(&table.header).map_err(|e| Failure::Io(e.to_string()))?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.flush()?;
            let text = serde_json::to_string(manifest).map_err(|e| Failure::Io(e.to_string()))?;
            match &cli.output {
                Some(path) => {
                    let mut name = path.as_os_str().to_owned();
                    name.push(".manifest.json");
                    std::fs::write(name, text + "\n")?;
                }
                None => eprintln!("{text}"),
            }
        }
    }
    Ok(())
}
