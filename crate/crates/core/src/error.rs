use std::path::PathBuf;

use thiserror::Error;

use crate::tridiag::SolveError;

/// A rejected configuration value, named by its configuration key.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{key}`: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("implicit step failed: {0}")]
    Solver(#[from] SolveError),
    #[error("{numeric} switch events detected but only {oracle} exact switches fall inside the horizon")]
    OracleMismatch { numeric: usize, oracle: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
