use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while simulating, analysing or reporting.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },

    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error("non-finite state at t = {time:.4} s ({what})")]
    NonFiniteState { time: f64, what: String },

    #[error("no static equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("invalid scenario: {0}")]
    InvalidSpec(String),

    #[error("trace is empty")]
    EmptyTrace,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("incomplete grid: {0}")]
    IncompleteGrid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl SimError {
    pub(crate) fn validation(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
