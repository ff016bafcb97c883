use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report, grouped by category so callers
/// (the CLI in particular) can map them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("storage error at {path}: {source}")]
    Storage {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("computation error: {0}")]
    Computation(String),
    #[error("spec error: {0}")]
    Spec(String),
}

/// Coarse error class used for exit codes and binding-side exceptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Unreadable or malformed input files.
    Format,
    /// Well-formed input violating a constraint.
    Constraint,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Storage { .. } | Error::Format(_) => ErrorCategory::Format,
            _ => ErrorCategory::Constraint,
        }
    }

    pub(crate) fn storage(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Storage {
            path: path.into(),
            source,
        }
    }
}
