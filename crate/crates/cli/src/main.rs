//! `entwit`: entanglement witnesses for thermal XXZ chains from the command
//! line.
//!
//! ```text
//! entwit --config witness.json --out results witness
//! entwit --config sweep.json --workers 8 sweep
//! entwit --config protocol.json verify
//! entwit --config sample.json --seed 7 sample
//! ```
//!
//! Exit codes: 0 success (entanglement detected, for `witness`), 3 witness
//! ran but did not detect, 1 configuration error, 2 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entwit::Route;

use commands::Globals;
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "entwit", version, about = "Relative-entropy entanglement witnesses for thermal XXZ chains")]
struct Cli {
    /// JSON config for the chosen command.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for result files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Overrides the config seed (verify, sample).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "ENTWIT_WORKERS")]
    workers: Option<usize>,

    /// Overrides the config route (witness, sweep).
    #[arg(long, global = true, value_parser = parse_route)]
    route: Option<Route>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Evaluate the witness for one state and write witness.json.
    Witness,
    /// Evaluate the witness over a (B, Jz, T) grid and write sweep.csv and sweep.json.
    Sweep,
    /// Check the work-statistics identities for a protocol and write verify.json.
    Verify,
    /// Emulate two-point measurements and write sample.csv and sample.json.
    Sample,
}

fn parse_route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: entwit::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<u8> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    let config = cli.config.ok_or_else(|| CliError::config("--config PATH is required"))?;
    let g = Globals {
        config,
        out: cli.out,
        seed: cli.seed,
        route: cli.route,
    };
    match cli.command {
        Command::Witness => commands::witness::run(&g),
        Command::Sweep => commands::sweep::run(&g),
        Command::Verify => commands::verify::run(&g),
        Command::Sample => commands::sample::run(&g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("entwit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
