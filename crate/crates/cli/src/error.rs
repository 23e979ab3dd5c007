use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures of one CLI invocation, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input.
    #[error("validation error: {0}")]
    Validation(String),
    /// The data does not support the requested inference.
    #[error("undiagnosable: {0}")]
    Undiagnosable(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Undiagnosable(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl From<osaas_core::Error> for CliError {
    fn from(e: osaas_core::Error) -> Self {
        match e {
            osaas_core::Error::Undiagnosable(m) => CliError::Undiagnosable(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
