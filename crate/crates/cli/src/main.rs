//! Command-line front end: factor tables, eigenfunctions, identity
//! verification, classification and numeric profiles as JSON or CSV.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod input;
mod output;

use commands::{ClassifyArgs, EigenArgs, FactorizeArgs, NumericCmd, VerifyArgs};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "susyfactor",
    version,
    about = "Ladder factorization of -p d^2 - q d"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// superpotential coefficients, gaps, energies and eigenvalues per level
    Factorize(FactorizeArgs),
    /// one eigenfunction by the chosen construction, checked against another
    Eigenfunction(EigenArgs),
    /// every exact identity up to a level; exit 1 if any fails
    Verify(VerifyArgs),
    /// recover (p, q), l and m from an expanded operator
    Classify(ClassifyArgs),
    /// coordinate maps, potentials and finite-difference checks on grids
    #[command(subcommand)]
    Numeric(NumericCmd),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SUSYFACTOR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n >= 1).ok_or_else(|| {
        CliError::Input(format!(
            "SUSYFACTOR_THREADS must be an integer >= 1, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.cmd {
        Cmd::Factorize(a) => commands::factorize(a),
        Cmd::Eigenfunction(a) => commands::eigenfunction(a),
        Cmd::Verify(a) => commands::verify(a),
        Cmd::Classify(a) => commands::classify(a),
        Cmd::Numeric(c) => commands::numeric(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
