//! `mapsearch`: synthetic inventories and click logs, simulated A/B
//! experiments, attention surfaces and map-center placement.
//!
//! Exit codes: 0 success, 1 other failure, 2 bad flags or unwritable output,
//! 3 malformed input, 4 unknown experiment or anchor, 5 surface center cell
//! not covered by the click log.

mod commands;
mod error;
mod io;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, GENERIC};

#[derive(Debug, Parser)]
#[command(name = "mapsearch", version, about)]
struct Cli {
    /// Worker threads; all cores when absent. Never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic inventory, one JSON listing per line.
    GenInventory(commands::GenInventory),
    /// Write a synthetic map click log, one JSON record per line.
    GenClicks(commands::GenClicks),
    /// Run a named experiment on an inventory and report every arm.
    RunExp(commands::RunExp),
    /// Estimate the click-through surface around the map center.
    EstimateSurface(commands::EstimateSurface),
    /// Click-through curves by search rank and distance rank.
    Curves(commands::Curves),
    /// Choose the map center that maximizes attention-weighted bookings.
    OptimizeCenter(commands::OptimizeCenter),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::new(GENERIC, format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::GenInventory(args) => commands::gen_inventory(args),
        Command::GenClicks(args) => commands::gen_clicks(args),
        Command::RunExp(args) => commands::run_exp(args),
        Command::EstimateSurface(args) => commands::estimate_surface(args),
        Command::Curves(args) => commands::curves(args),
        Command::OptimizeCenter(args) => commands::optimize(args),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("mapsearch: {err}");
            err.exit_code()
        }
    }
}
