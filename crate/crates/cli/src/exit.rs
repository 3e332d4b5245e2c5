use std::fmt;

use gkdv_core::Error;

/// Process exit status. The numeric values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitCode {
    Ok = 0,
    Io = 1,
    Config = 2,
    Numerical = 3,
    Verdict = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Numerical(String),
    /// One or more verdicts failed; the artifacts were still written.
    Verdict(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::Io,
            CliError::Config(_) => ExitCode::Config,
            CliError::Numerical(_) => ExitCode::Numerical,
            CliError::Verdict(_) => ExitCode::Verdict,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Verdict(names) => write!(f, "verdict failure: {}", names.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::Io(_) | Error::Malformed(_) => CliError::Io(msg),
            Error::InvalidParameter(_)
            | Error::GridMismatch(_)
            | Error::OutOfRange { .. }
            | Error::NoAdmissibleParameters { .. } => CliError::Config(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
