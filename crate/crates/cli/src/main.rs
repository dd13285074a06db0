//! `polar-fault-lab`: construct, bound, simulate and optimize polar codes
//! decoded by a faulty successive cancellation decoder.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Command;
use crate::config::{config_error, RunConfig};
use crate::error::CliResult;
use crate::output::Outputs;

const THREADS_ENV: &str = "POLAR_FAULT_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "polar-fault-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    config: RunConfig,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| config_error(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| config_error(format!("cannot size the thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let mut outputs = Outputs::new(&cli.config.out, cli.config.format)?;
    let result = commands::run(&cli.command, &cli.config, &mut outputs);
    if result.is_err() {
        outputs.discard();
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polar-fault-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
