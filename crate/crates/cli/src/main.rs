//! `gmc`: experiment and evaluation front end.
//!
//! Exit codes: 0 success, 1 runtime or solver failure, 2 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{DenoiseArgs, EvalArgs, SweepArgs, ThresholdArgs};

#[derive(Debug, Parser)]
#[command(
    name = "gmc",
    version,
    about = "Sparse denoising with the generalized MC penalty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lambda sweep of the DFT-frame denoising study; writes records and aggregates CSVs.
    Sweep(SweepArgs),
    /// Denoise one signal with l1, debiased l1 or GMC.
    Denoise(DenoiseArgs),
    /// Tabulate S_B and psi_B on a 2-D grid for a matrix B.
    Eval(EvalArgs),
    /// Tabulate the firm and soft threshold functions.
    Threshold(ThresholdArgs),
}

/// Failure of a subcommand, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => commands::cmd_sweep(&a),
        Command::Denoise(a) => commands::cmd_denoise(&a),
        Command::Eval(a) => commands::cmd_eval(&a),
        Command::Threshold(a) => commands::cmd_threshold(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
