//! `fsd`: runs the foil/source experiments from a JSON configuration.

mod commands;
mod config;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;
use failure::Failure;

#[derive(Parser)]
#[command(name = "fsd", version = env!("FSD_GIT_DESCRIBE"), about = "Foil and point source in an ideal fluid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; sidecars are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch experiments.
    #[arg(long, global = true, env = "FSD_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the full foil/source system and write the trajectory.
    Simulate,
    /// Compare the closed-form pressure force with contour quadrature.
    ForceCheck,
    /// Energy curves and leaf counts of the balanced foil.
    Bifurcation,
    /// Effective potential on a grid and its critical points.
    Potential,
    /// Boundaries of Hill's regions.
    Hill,
    /// Iterate the scattering map on a grid of starts.
    Scatter,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let path = cli.config.ok_or_else(|| Failure::Config("--config <path> is required".into()))?;
    let ctx = Context { cfg: RunConfig::load(&path)?, out: cli.out, seed: cli.seed };
    match cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::ForceCheck => commands::force_check_cmd(&ctx),
        Command::Bifurcation => commands::bifurcation(&ctx),
        Command::Potential => commands::potential(&ctx),
        Command::Hill => commands::hill(&ctx),
        Command::Scatter => commands::scatter(&ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fsd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
