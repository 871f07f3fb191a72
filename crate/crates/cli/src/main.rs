//! Command-line front end for the noise-eater interferometer simulator.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, malformed or
//! unknown config entries), 2 on validation or numeric failures.

mod commands;
mod config;
mod output;
mod validate;

use clap::{Args, Parser, Subcommand};

use config::{RawOptions, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }

    pub fn numeric_from(err: noise_eater_core::Error) -> Self {
        CliError::Numeric(err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

/// Simulator of a conditionally noise-cleaned single-photon interferometer.
#[derive(Parser)]
#[command(name = "noise-eater", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CountsOptions {
    #[command(flatten)]
    common: RawOptions,
    /// Emulate coincidence counts of the conditional fringe instead of the
    /// uncorrected singles
    #[arg(long)]
    conditional: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Uncorrected and conditional fringes over the phase grid
    Fringe(RawOptions),
    /// Visibility against the noise coupling T, with the 1/√2 benchmark
    Sweep(RawOptions),
    /// Optimal noise-eater settings (η_A*, T_R*) and achieved visibility
    Optimize(RawOptions),
    /// Multi-photon-noise sweep with the tap re-optimized per T
    Corollary(RawOptions),
    /// Emulated Poisson photo-counts and the fitted visibility
    Counts(CountsOptions),
    /// Analytic-versus-numeric oracle suite; nonzero exit on any residual
    /// at or above 1e-9
    Validate(RawOptions),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fringe(raw) => commands::cmd_fringe(&RunConfig::resolve(&raw)?),
        Command::Sweep(raw) => commands::cmd_sweep(&RunConfig::resolve(&raw)?),
        Command::Optimize(raw) => commands::cmd_optimize(&RunConfig::resolve(&raw)?),
        Command::Corollary(raw) => commands::cmd_corollary(&RunConfig::resolve(&raw)?),
        Command::Counts(opts) => {
            commands::cmd_counts(&RunConfig::resolve(&opts.common)?, opts.conditional)
        }
        Command::Validate(raw) => validate::cmd_validate(&RunConfig::resolve(&raw)?),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
