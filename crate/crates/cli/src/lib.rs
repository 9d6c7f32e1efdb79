//! Command-line front end for `qsp-core`.

pub mod args;
mod bench;
mod files;
mod solve;
mod verify;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use qsp_core::{ExactError, InstanceError, SaError};
use thiserror::Error;

use args::{Cli, Command};

pub use bench::{BenchRow, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: InstanceError },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Heuristic(#[from] SaError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Text for standard output plus the exit status.
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn execute(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Solve(a) => solve::run(&a),
        Command::Gen(a) => files::generate(&a),
        Command::Convert(a) => files::convert(&a),
        Command::VerifyPaper(a) => Ok(verify::run(&a)),
        Command::Bench(a) => bench::run(&a),
    }
}

/// Parses `args` and runs the command. Standard output is written only when
/// the command produced a result; errors go to `err` alone.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(output) => {
            let _ = out.write_all(output.text.as_bytes());
            output.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
