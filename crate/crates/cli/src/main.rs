use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod grid;
mod output;

/// Binary coherent-state receiver simulator: error rates, tradeoff curves,
/// key rates and Monte Carlo runs, written as CSV with a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "cohdisc", version)]
struct Cli {
    /// Directory for results. Without it, tables go to stdout and no
    /// manifest is written.
    #[arg(long, global = true, env = "COHDISC_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kennedy and optimized-displacement PNR error rates.
    ErrorRates(commands::error_rates::Args),
    /// PNR, matched homodyne and optimal intermediate measurement side by side.
    Tradeoff(commands::tradeoff::Args),
    /// Optimized key rate versus channel transmittance.
    Keyrate(commands::keyrate::Args),
    /// Emulate the two-receiver experiment and estimate its rates.
    Montecarlo(commands::montecarlo::Args),
}

/// A rejected input, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<cohdisc::Error>() {
        Some(cohdisc::Error::Numerical(_) | cohdisc::Error::Undefined(_)) => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sink = output::Sink::new(cli.out_dir);
    let result = match cli.command {
        Command::ErrorRates(args) => commands::error_rates::run(args, &sink),
        Command::Tradeoff(args) => commands::tradeoff::run(args, &sink),
        Command::Keyrate(args) => commands::keyrate::run(args, &sink),
        Command::Montecarlo(args) => commands::montecarlo::run(args, &sink),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
