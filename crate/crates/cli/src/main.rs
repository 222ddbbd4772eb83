//! `fracspec solve|converge|compare --config <path> [--out <dir>]`.
//!
//! Exit status is 0 on success, 1 for configuration or input errors and 2 when
//! the numerics fail.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] fracspec::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracspec", version, about = "Spectral Petrov-Galerkin solver for two-sided fractional diffusion-advection-reaction problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Paths {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve once at degree N and sample the solution.
    Solve(Paths),
    /// Errors and observed rates for each degree in Ns against N_ref.
    Converge(Paths),
    /// Both operator variants for each diffusivity.
    Compare(Paths),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let needs_degrees = matches!(cli.command, Command::Converge(_));
    let (paths, action): (Paths, fn(&config::Resolved) -> Result<(), CliError>) = match cli.command {
        Command::Solve(p) => (p, output::write_solve),
        Command::Converge(p) => (p, output::write_converge),
        Command::Compare(p) => (p, output::write_compare),
    };
    let resolved = RunConfig::load(&paths.config)?.resolve(paths.out)?;
    if needs_degrees && resolved.config.ns.is_none() {
        return Err(CliError::Config("converge needs \"Ns\"".into()));
    }
    output::prepare(&resolved)?;
    action(&resolved)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
