//! `nosignal`: command-line driver for the measured-chain experiments.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::GridSpec;

#[derive(Parser)]
#[command(name = "nosignal", version, about = "No-signalling checks for measured Ising chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense no-signalling run plus the symbolic series check on one setup.
    Verify(Common),
    /// Runs the `[scenario]` table and compares with its expected verdict.
    Counterexample(Common),
    /// Isolated two-qubit pair: measured versus unmeasured reduced state.
    Baseline(Common),
    /// Nested-commutator series report for one setup.
    Series(Common),
    /// Monte-Carlo lattice over chain sizes, cuts and seeds.
    Sweep(Common),
}

#[derive(Args, Clone)]
pub struct Common {
    /// Configuration file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = "NOSIGNAL_OUT_DIR", default_value = "nosignal-out")]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Overrides the time grid.
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub grid: Option<GridSpec>,
    /// Overrides the series depth.
    #[arg(long, value_name = "K")]
    pub depth: Option<usize>,
    /// Worker threads for sweeps; all cores when absent.
    #[arg(long, value_name = "M")]
    pub jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(c) => commands::verify(c),
        Command::Counterexample(c) => commands::counterexample(c),
        Command::Baseline(c) => commands::baseline(c),
        Command::Series(c) => commands::series(c),
        Command::Sweep(c) => commands::sweep(c),
    };
    match result {
        Ok(outcome) => outcome.report(),
        Err(failure) => failure.report(),
    }
}
