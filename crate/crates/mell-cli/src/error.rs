use mell_core::{ExperimentError, SeparationError, StructError, ValueError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Structure(#[from] StructError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() }
    }
}
