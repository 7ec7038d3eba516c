//! A small multilayer-perceptron lab: datasets, IDX ingestion, a
//! from-scratch ReLU MLP and deterministic minibatch SGD on mean squared
//! error against one-hot targets.

pub mod dataset;
pub mod idx;
pub mod mlp;
pub mod train;

pub use dataset::{corrupt_labels, corrupt_labels_with, generate_synthetic, subsample, Dataset, LabelNoise};
pub use idx::load_idx;
pub use mlp::{build_mlp, evaluate_mse, hidden_widths, Layer, MlpModel, MLP_DEPTH};
pub use train::{train_sgd, TrainConfig, TrainingTrace};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("{path}: bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic { path: PathBuf, expected: u32, found: u32 },
    #[error("{path}: truncated, expected {expected} bytes but found {found}")]
    Truncated { path: PathBuf, expected: usize, found: usize },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("label {value} at index {index} is outside 0..10")]
    InvalidLabel { index: usize, value: u8 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },
}

pub type Result<T> = std::result::Result<T, NnError>;
