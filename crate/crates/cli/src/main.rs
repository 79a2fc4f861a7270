//! `royden-lab`: runs manifest-described experiments and writes JSON reports
//! and CSV tables.

mod commands;
mod manifest;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use royden_core::Error;

use manifest::Entry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Harmonic measure, harmonic units, Q functions and the period matrix.
    Measure,
    /// Inner-outer factorization of each corpus function.
    Factor,
    /// Galerkin sweep over invariant-subspace degrees.
    Beurling,
    /// Gauge-norm axioms, norms and dual norms.
    Gauge,
    /// Graph map of an affiliated pair.
    Affiliated,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Factor => "factor",
            Command::Beurling => "beurling",
            Command::Gauge => "gauge",
            Command::Affiliated => "affiliated",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "royden-lab", version, about = "Hardy-space experiments on circular domains")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Manifest file: one entry object or a list of them.
    #[arg(long)]
    manifest: PathBuf,
    /// Number of manifest entries run at once.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
    /// Output root; overrides the manifest `out` field. Defaults to `royden-out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_OUT: &str = "royden-out";

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        2
    } else {
        3
    }
}

fn error_record(e: &Error) -> serde_json::Value {
    json!({ "error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e) })
}

/// Writes the error record to `dir/error.json` (best effort) and stderr.
fn report_error(e: &Error, dir: Option<&Path>) {
    let record = error_record(e);
    if let Some(dir) = dir {
        if std::fs::create_dir_all(dir).is_ok() {
            if let Err(w) = report::write_json(&record, &dir.join("error.json")) {
                eprintln!("royden-lab: could not write error record: {w}");
            }
        }
    }
    eprintln!("{record}");
}

fn run_entry(cli: &Cli, entry: &Entry) -> u8 {
    let root = cli.out.clone().or_else(|| entry.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let dir = root.join(&entry.name);
    let start = Instant::now();
    let result = commands::run(cli.command, entry).and_then(|out| report::emit(&out, &dir));
    let (status, code) = match &result {
        Ok(()) => ("ok", 0),
        Err(e) => {
            report_error(e, Some(&dir));
            (e.kind(), exit_code(e))
        }
    };
    let meta = json!({
        "tool": "royden-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "manifest": cli.manifest.display().to_string(),
        "entry": entry.name,
        "jobs": cli.jobs,
        "elapsed_seconds": start.elapsed().as_secs_f64(),
        "status": status,
    });
    if std::fs::create_dir_all(&dir).is_ok() {
        if let Err(e) = report::write_json(&meta, &dir.join("meta.json")) {
            eprintln!("royden-lab: could not write run metadata: {e}");
        }
    }
    if code == 0 {
        println!("{} {}: ok -> {}", cli.command.name(), entry.name, dir.display());
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let entries = match manifest::load(&cli.manifest, cli.command) {
        Ok(e) => e,
        Err(e) => {
            report_error(&e, Some(cli.out.as_deref().unwrap_or(Path::new(DEFAULT_OUT))));
            return ExitCode::from(exit_code(&e));
        }
    };
    let codes: Vec<u8> = if cli.jobs > 1 && entries.len() > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.into()).build() {
            Ok(pool) => pool.install(|| entries.par_iter().map(|e| run_entry(&cli, e)).collect()),
            Err(e) => {
                report_error(&Error::Config(format!("thread pool: {e}")), None);
                return ExitCode::from(2);
            }
        }
    } else {
        entries.iter().map(|e| run_entry(&cli, e)).collect()
    };
    ExitCode::from(codes.into_iter().max().unwrap_or(0))
}
