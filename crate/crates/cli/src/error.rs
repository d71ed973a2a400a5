use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use mapsearch::Error;

/// A failed command: what to print and which exit status to return.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const GENERIC: u8 = 1;
/// Bad flag values or an unwritable output path.
pub const USAGE: u8 = 2;
pub const BAD_INPUT: u8 = 3;
pub const UNKNOWN_NAME: u8 = 4;
pub const UNCOVERED_CENTER: u8 = 5;

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn output(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(USAGE, format!("cannot write {}: {err}", path.display()))
    }

    pub fn input(path: &Path, err: impl fmt::Display) -> Self {
        Self::new(BAD_INPUT, format!("cannot read {}: {err}", path.display()))
    }

    pub fn at_line(path: &Path, line: usize, err: impl fmt::Display) -> Self {
        Self::new(BAD_INPUT, format!("{}:{line}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Unknown { .. } => UNKNOWN_NAME,
            Error::UncoveredCenter { .. } => UNCOVERED_CENTER,
            Error::InvalidConfig(_) => USAGE,
            Error::MissingRankOne
            | Error::MissingRelevance(_)
            | Error::DuplicateId(_)
            | Error::PositiveLogit(_)
            | Error::NonFinite { .. }
            | Error::Empty(_)
            | Error::UnresolvableAttention { .. } => BAD_INPUT,
        };
        Self::new(code, err.to_string())
    }
}
