//! `subord`: run, verify, generate, and benchmark ordered set-function
//! maximization instances.
//!
//! Exit codes: 0 command completed; 1 instance or runtime error; 2 usage
//! error (incompatible algorithm/constraint, bad flags); 3 enumeration cap
//! exceeded.

use clap::{Parser, Subcommand};
use subord_core::Error as CoreError;

mod bench;
mod common;
mod gen;
mod run;
mod verify_cmd;

#[derive(Parser)]
#[command(
    name = "subord",
    version,
    about = "Constrained maximization of ordered set functions and assortment instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm on an instance file and report value, optimum, and
    /// query counts.
    Run(run::RunArgs),
    /// Check a structural property of an instance, reporting a witness on
    /// failure.
    Verify(verify_cmd::VerifyArgs),
    /// Generate an instance file.
    Gen(gen::GenArgs),
    /// Run the ratio/query benchmark suite, optionally emitting CSV.
    Bench(bench::BenchArgs),
}

/// Errors carry the process exit code.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn instance(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::CapExceeded { .. } => 3,
            CoreError::Incompatible(_) | CoreError::InvalidInput(_) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run::execute(args),
        Command::Verify(args) => verify_cmd::execute(args),
        Command::Gen(args) => gen::execute(args),
        Command::Bench(args) => bench::execute(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

/// Seed resolution: flag, then the SUBORD_SEED environment variable, then 0.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("SUBORD_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}
