//! Command-line front end for `qsmooth-core`.
//!
//! Exit codes: 0 success, 1 inequality violation, 2 usage or I/O error,
//! 3 numeric non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt;
use std::io;

use clap::Parser;

pub mod args;
pub mod figures;
pub mod output;
pub mod verify;

use args::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String, io::Error),
    Csv(csv::Error),
    Json(serde_json::Error),
    Core(qsmooth_core::Error),
}

impl CliError {
    /// A parameter the core rejected; reported as a usage error.
    pub fn invalid(e: qsmooth_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        use qsmooth_core::Error as E;
        match self {
            CliError::Core(E::QuadratureNonConvergence { .. } | E::EigenNonConvergence) => EXIT_NONCONVERGENCE,
            CliError::Core(E::Precondition(_)) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(ctx, e) => write!(f, "{ctx}: {e}"),
            CliError::Csv(e) => write!(f, "csv output: {e}"),
            CliError::Json(e) => write!(f, "json output: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qsmooth_core::Error> for CliError {
    fn from(e: qsmooth_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Fig2(a) => figures::fig2(a),
        Command::Fig3(a) => figures::fig3(a),
        Command::Fig4(a) => figures::fig4(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qsmooth: {e}");
            e.exit_code()
        }
    }
}
