mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use padist::PadicError;

use crate::commands::Failure;
use crate::config::{GlobalArgs, RunConfig};

/// Finite-precision p-adic analysis from the command line.
#[derive(Debug, Parser)]
#[command(name = "padist", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: commands::Command,
}

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_INVARIANT: u8 = 4;
const EXIT_CRITERIA: u8 = 5;

fn classify(e: &PadicError) -> (u8, &'static str) {
    match e {
        PadicError::InvalidInput(_) | PadicError::NotPrime(_) | PadicError::DivisionByZero => {
            (EXIT_PARSE, "parse")
        }
        PadicError::PrecisionExhausted(_)
        | PadicError::Indeterminate(_)
        | PadicError::InfiniteValuation(_) => (EXIT_PRECISION, "precision"),
        PadicError::Invariant(_)
        | PadicError::NotInSubgroup(_)
        | PadicError::OutsideDomain { .. } => (EXIT_INVARIANT, "invariant"),
        _ => (EXIT_OTHER, "other"),
    }
}

fn diagnose(kind: &str, message: &str) {
    let diag = serde_json::json!({"error": kind, "message": message});
    eprintln!("{diag}");
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let output = commands::run(&cli.command, &cfg, cli.global.format)?;
    match &cli.global.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| Failure::Io(e.to_string()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    if output.criteria_failed {
        return Err(Failure::Criteria);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Padic(e)) => {
            let (code, kind) = classify(&e);
            diagnose(kind, &e.to_string());
            ExitCode::from(code)
        }
        Err(Failure::Parse(m)) => {
            diagnose("parse", &m);
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Io(m)) => {
            diagnose("io", &m);
            ExitCode::from(EXIT_OTHER)
        }
        Err(Failure::Criteria) => ExitCode::from(EXIT_CRITERIA),
    }
}
