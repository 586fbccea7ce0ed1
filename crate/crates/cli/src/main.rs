//! `omedian`: reproducible experiments for online bidding and oblivious
//! k-median.
//!
//! Exit codes: 0 success, 1 a verification step failed, 2 usage error or
//! unreadable input.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;

pub enum Failure {
    /// Bad flags, unreadable or malformed input, guard violations.
    Usage(String),
    /// An invariant or precondition check tripped.
    Verify(String),
}

impl From<omedian_core::Error> for Failure {
    fn from(e: omedian_core::Error) -> Self {
        use omedian_core::Error as E;
        match e {
            E::Invariant(_)
            | E::NotMetric { .. }
            | E::NonMonotoneOffline { .. }
            | E::NotSizeCompetitive { .. }
            | E::ThresholdUncovered(_) => Failure::Verify(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = json!({
        "seed": cli.seed,
        "command": cli.command,
    });
    let art = match commands::run(&cli) {
        Ok(a) => a,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            return ExitCode::from(1);
        }
    };
    let ok = art.ok;
    if let Err(e) = output::emit(art, &config, &cli.command.stem(), cli.format, cli.out_dir.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed; see the summary for details");
        ExitCode::from(1)
    }
}
