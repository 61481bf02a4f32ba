//! `phaselp` — theory curves, single solves, and Monte Carlo sweeps for
//! anchored phase retrieval, with reproducible CSV/JSON outputs.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 solver
//! non-convergence (the report is still written).

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod output;
mod run;

use args::{Cli, Command};
use run::ExitOutcome;

fn init_workers() {
    if let Ok(raw) = std::env::var("PHASE_WORKERS") {
        match raw.parse::<usize>() {
            Ok(workers) if workers >= 1 => {
                // ignore failure: the global pool may already exist in tests
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid PHASE_WORKERS='{raw}'"),
        }
    }
}

fn main() -> ExitCode {
    init_workers();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Theory(a) => run::cmd_theory(a),
        Command::Solve(a) => run::cmd_solve(a),
        Command::Sweep(a) => run::cmd_sweep(a),
    };
    match outcome {
        Ok(ExitOutcome::Success) => ExitCode::SUCCESS,
        Ok(ExitOutcome::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
