//! `regret`: expected regret of balanced rank-subset adversaries.

mod commands;
mod svg;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    version,
    about = "Exact expected regret of balanced rank-subset adversaries"
)]
struct Cli {
    /// Worker threads for the engines (defaults to all cores)
    #[arg(long, global = true, env = "REGRET_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regret series R(T) of one fixed subset, as CSV
    Eval(commands::EvalArgs),
    /// D(T) = scale * (R_a^2 - R_b^2) / T between two subsets, plus a constancy summary
    Compare(commands::CompareArgs),
    /// Best adaptive adversary over a subset family
    Optimal(commands::OptimalArgs),
    /// Best single fixed subset over all canonical subsets
    BestFixed(commands::BestFixedArgs),
    /// The [1,3] vs [1,3,5] sweep for k = 5, as CSV and SVG
    Figure1(commands::Figure1Args),
    /// Run check suites; exit 1 on any failure
    Verify(commands::VerifyArgs),
}

/// Bad flags or values, reported before any computation (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Checks ran and at least one failed (exit code 1).
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    }

    let result = match cli.command {
        Command::Eval(args) => commands::eval(args),
        Command::Compare(args) => commands::compare(args),
        Command::Optimal(args) => commands::optimal(args),
        Command::BestFixed(args) => commands::best_fixed(args),
        Command::Figure1(args) => commands::figure1(args),
        Command::Verify(args) => commands::verify(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
