mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Job;
use crate::config::{parse_sweep, RunConfig};
use crate::error::CliError;

/// Order-by-order persistence of resonant caustics in deformed circular billiards.
#[derive(Parser)]
#[command(name = "caustica", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the breaking order for each rotation number.
    Analyze(Args),
    /// Check residual scaling against the numerical billiard map.
    Verify(Args),
    /// Emit a corrected deformation that persists to --max-order.
    Correct(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    max_order: Option<usize>,
    /// Epsilon sweep as `lo,hi,n`.
    #[arg(long, value_parser = parse_sweep)]
    eps_sweep: Option<(f64, f64, usize)>,
    /// Only rotations p/q with p = 1.
    #[arg(long)]
    p1_only: bool,
}

impl Args {
    fn job(self) -> Result<Job, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(k) = self.max_order {
            config.max_order = k;
        }
        if let Some(sweep) = self.eps_sweep {
            config.oracle.eps_sweep = sweep;
        }
        config.p1_only |= self.p1_only;
        Job::new(config, self.out)
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("CAUSTICA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => commands::analyze(&args.job()?),
        Command::Verify(args) => commands::verify(&args.job()?),
        Command::Correct(args) => commands::correct(&args.job()?),
    }
}

fn main() -> ExitCode {
    init_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("caustica: {err}");
            err.exit_code()
        }
    }
}
