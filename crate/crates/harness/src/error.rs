use std::path::PathBuf;

use scalinglab_core::double_descent::DoubleDescentError;
use scalinglab_core::predictor::PredictError;
use scalinglab_core::subspace::SubspaceError;
use scalinglab_nn::NnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("invalid key `{key}`: {reason}")]
    InvalidKey { key: String, reason: String },
    #[error("config: {0}")]
    Config(String),
    #[error("output directory {path} is not writable: {source}")]
    OutputDir { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("series {label} does not share the x-grid: {reason}")]
    MismatchedGrid { label: String, reason: String },
    #[error("plot: {0}")]
    Plot(String),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    DoubleDescent(#[from] DoubleDescentError),
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Nn(#[from] NnError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::InvalidKey { key: key.to_string(), reason: reason.into() }
}
