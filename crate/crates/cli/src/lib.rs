//! Library side of the `colreg-risk` command: scenario configuration, the
//! `run`, `analyze` and `selftest` subcommands, and their exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analyze;
pub mod config;
pub mod run;
pub mod selftest;

use std::fmt;
use std::path::Path;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    SelfTest,
    Config,
    Numeric,
    Io,
}

impl FailureKind {
    pub fn exit_code(self) -> u8 {
        match self {
            FailureKind::SelfTest => 1,
            FailureKind::Config => 2,
            FailureKind::Numeric => 3,
            FailureKind::Io => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: FailureKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: FailureKind::Config,
            message: message.into(),
        }
    }

    pub fn numeric(context: &str, err: colreg_risk::Error) -> Self {
        Self {
            kind: FailureKind::Numeric,
            message: format!("{context}: {err}"),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            kind: FailureKind::Io,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Formats a value for CSV at full round-trip precision.
pub(crate) fn csv_f64(x: f64) -> String {
    format!("{x}")
}

/// File-name label for a bearing: `30` for whole degrees, `22.5` otherwise.
pub fn bearing_label(b: f64) -> String {
    if b.fract() == 0.0 {
        format!("{}", b as i64)
    } else {
        format!("{b}")
    }
}
