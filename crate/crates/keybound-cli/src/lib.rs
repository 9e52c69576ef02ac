//! Command-line front end for `keybound`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{ConfigArgs, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "keybound", version, about = "Finite-size secret-key capacity bounds for bosonic channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit bound curves over n as CSV.
    Bounds(ConfigArgs),
    /// Solve for the finite-energy resource state of a thermal channel.
    Solve(ConfigArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Corrupt the checked values to confirm the suite catches it.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, log: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(log, "{}", e.render()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bounds(a) => RunConfig::resolve(a).and_then(|c| commands::cmd_bounds(&c, out, log)),
        Command::Solve(a) => RunConfig::resolve(a).and_then(|c| commands::cmd_solve(&c, out, log)),
        Command::Verify(a) => RunConfig::resolve(&a.config).and_then(|c| {
            match verify::cmd_verify(a.inject_fault, c.verbose, out) {
                Ok(true) => Ok(()),
                Ok(false) => Err(CliError::Numeric("verification failed".into())),
                Err(e) => Err(CliError::Io(e.to_string())),
            }
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            if matches!(e, CliError::Numeric(ref m) if m.starts_with("solver")) {
                let _ = writeln!(log, "hint: --best-effort uses the closest resource state and gives a looser bound");
            }
            e.exit_code()
        }
    }
}
