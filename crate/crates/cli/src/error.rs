use std::path::PathBuf;

use thiserror::Error;

use endslab::error::{EstimateError, ModelError, SolitonError, SolverError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl CliError {
    /// Usage and configuration problems exit with 1; numerical failures
    /// count as failed checks and exit with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => 2,
            _ => 1,
        }
    }
}
