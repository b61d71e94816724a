//! Command-line front end for `armax-core`.
//!
//! Every subcommand reads a JSON [`RunConfig`]; `--seed`, `--out` and
//! `--replicates` override the matching config fields. Outputs are CSV files
//! (plus JSON sidecars) written only by the coordinating thread, so identical
//! inputs give byte-identical files.
//!
//! Exit codes: 0 success (possibly with warning rows), 2 configuration error,
//! 3 numeric failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

pub use config::{CommandKind, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "armax", version, about = "Simulation and extreme-value inference for ARMAX processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output CSV; sidecars are written next to it. Stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true)]
    pub replicates: Option<usize>,

    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Cmd {
    /// Simulate a path: CSV plus a metadata JSON sidecar.
    Simulate,
    /// Estimate c by the moment, Lebedev and Davis-Resnick methods, with Hill alpha.
    Estimate,
    /// Theoretical vs empirical extremal index over a tau grid.
    ExtremalIndex,
    /// Lag-r tail dependence and tail independence coefficients.
    TailDep,
    /// Extremal coefficients and evaluations of a base and a derived copula.
    Copula,
    /// Replicated estimation: replicate CSV plus summary JSON.
    Montecarlo,
}

impl Cmd {
    pub fn kind(self) -> CommandKind {
        match self {
            Cmd::Simulate => CommandKind::Simulate,
            Cmd::Estimate => CommandKind::Estimate,
            Cmd::ExtremalIndex => CommandKind::ExtremalIndex,
            Cmd::TailDep => CommandKind::TailDep,
            Cmd::Copula => CommandKind::Copula,
            Cmd::Montecarlo => CommandKind::Montecarlo,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<armax_core::Error> for CliError {
    fn from(e: armax_core::Error) -> Self {
        match e {
            armax_core::Error::NumericLimit(_) => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

/// Config file merged with command-line overrides, command filled in.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(r) = cli.replicates {
        cfg.replicates = Some(r);
    }
    cfg.command = Some(cfg.command.unwrap_or(cli.command.kind()));
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = effective_config(cli)?;
    let kind = cli.command.kind();
    cfg.validate(kind)?;
    if cli.print_config {
        print!("{}", cfg.to_json());
        return Ok(());
    }
    commands::dispatch(kind, &cfg)
}

/// Parses `args`, runs, reports on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
