//! `expwell`: spectra, Table-1 brackets, figure datasets and the self-check
//! for the potential V(x) = g²·e^{|x|}.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("computation failed: {0}")]
    Compute(#[from] expwell::Error),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Mismatch(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Table1(a) => commands::table1(a),
        Command::Figure3(a) => commands::figure3(a),
        Command::Figure4(a) => commands::figure4(a),
        Command::Figure5(a) => commands::figure5(a),
        Command::Figure6(a) => commands::figure6(a),
        Command::Wavefunction(a) => commands::wavefunction(a),
        Command::Check(a) => commands::check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
