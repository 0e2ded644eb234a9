use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the simulator, dataset and training layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A size, count or hyperparameter outside its allowed range.
    #[error("configuration error: {0}")]
    Config(String),
    /// A gate or observable that does not fit the register it is applied to.
    #[error("structural error: {0}")]
    Structural(String),
    /// An input value outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A loss or gradient evaluated to NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// Malformed data file contents.
    #[error("format error: {0}")]
    Format(String),
    /// Two result sets that cannot be compared.
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("refusing to overwrite existing file {}", .0.display())]
    Exists(PathBuf),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
