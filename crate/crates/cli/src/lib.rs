//! Batch driver for the heiscr verification suites and reports.

pub mod commands;
pub mod config;
pub mod ledger;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{CommonArgs, Defaults, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] heiscr_core::Error),
    #[error("cannot write {path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use heiscr_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(E::InvalidParameter(_) | E::OutOfDomain(_) | E::DimensionMismatch { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "heiscr", version, about = "Sasakian, CR and sub-Riemannian checks on the Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every invariant suite
    Verify(CommonArgs),
    /// Scalar curvature of the deformed metric against the calibrated closed form
    Curvature(CommonArgs),
    /// Penalized distances converging to the Carnot-Caratheodory distance
    Ccdist(CommonArgs),
    /// Descent to the nilmanifold, homology and projected lattice
    Quotient(CommonArgs),
    /// Closed-form against integrated Reeb flow
    Flow(CommonArgs),
    /// Positivity and reduction of a Sasaki cone element
    Cone(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Verify(a)
            | Command::Curvature(a)
            | Command::Ccdist(a)
            | Command::Quotient(a)
            | Command::Flow(a)
            | Command::Cone(a) => a,
        }
    }

    fn defaults(&self) -> Defaults {
        match self {
            Command::Flow(_) => Defaults { samples: 8, ..Default::default() },
            _ => Defaults::default(),
        }
    }
}

/// Runs a parsed command and writes its output; returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let cfg = cli.command.args().resolve(&cli.command.defaults())?;
    let outcome = match &cli.command {
        Command::Verify(_) => commands::verify(&cfg),
        Command::Curvature(_) => commands::curvature(&cfg)?,
        Command::Ccdist(_) => commands::ccdist(&cfg)?,
        Command::Quotient(_) => commands::quotient(&cfg)?,
        Command::Flow(_) => commands::flow(&cfg)?,
        Command::Cone(_) => commands::cone(&cfg)?,
    };
    emit(&cfg, &outcome)?;
    for r in outcome.report.records.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} residual={:e} tolerance={:e}", r.id, r.residual, r.tolerance);
    }
    Ok(if outcome.report.all_pass() { 0 } else { 1 })
}

fn write_to(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.clone(),
        msg: e.to_string(),
    })
}

/// JSON goes to `--out` or stdout. With `--format csv` the table goes there
/// instead and the JSON report to `<out>.json` (stderr without `--out`).
fn emit(cfg: &config::RunConfig, o: &Outcome) -> Result<(), CliError> {
    let json = o.report.to_json();
    match (cfg.format, &cfg.out) {
        (Format::Json, Some(p)) => write_to(p, &json),
        (Format::Json, None) => {
            let _ = std::io::stdout().write_all(json.as_bytes());
            Ok(())
        }
        (Format::Csv, Some(p)) => {
            write_to(p, &o.csv)?;
            let mut side = p.clone().into_os_string();
            side.push(".json");
            write_to(&PathBuf::from(side), &json)
        }
        (Format::Csv, None) => {
            let _ = std::io::stdout().write_all(o.csv.as_bytes());
            let _ = std::io::stderr().write_all(json.as_bytes());
            Ok(())
        }
    }
}
