mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use config::{Args, RunConfig};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "extremal-disc", version, about = "Kobayashi metric, distance and retractions of convex domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Infinitesimal Kobayashi metric for the `metric` queries.
    Metric,
    /// Kobayashi distance for the `distance` queries.
    Distance,
    /// Check a disc against a dual element (`--disc`, `--dual`).
    Certify,
    /// Build retractions from the extremal discs of `metric` queries and check them.
    Retract,
    /// Compare Kobayashi and Carathéodory bounds for the `ck_check` queries.
    CkCheck,
    /// Closed-form comparison suite on the disc, ball and polydisc.
    Table,
    /// Boundary profiles of extremal discs.
    Diagnostics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Metric => "metric",
            Command::Distance => "distance",
            Command::Certify => "certify",
            Command::Retract => "retract",
            Command::CkCheck => "ck_check",
            Command::Table => "table",
            Command::Diagnostics => "diagnostics",
        }
    }
}

/// Bad input: nothing was written.
pub const EXIT_CONFIG: u8 = 1;
/// A solver or check failed: the report was still written.
pub const EXIT_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match RunConfig::from_args(cli.args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match commands::run(cli.command, &cfg) {
        Ok(outcome) if outcome.all_ok => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("{} of {} items failed", outcome.failed, outcome.total);
            ExitCode::from(EXIT_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
