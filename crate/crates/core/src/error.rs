use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },

    #[error("row {row}: invalid label value {value:?} for {column}")]
    InvalidLabel {
        row: usize,
        column: &'static str,
        value: String,
    },

    #[error("unknown task {0:?} (expected aggression, gender or communal)")]
    UnknownTask(String),

    #[error("corpus is not labeled")]
    Unlabeled,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("feature value is NaN at row {row}, column {col}")]
    NanFeature { row: usize, col: usize },

    #[error("id mismatch between predictions and gold: {0}")]
    IdMismatch(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad invocation or configuration rather than
    /// a failure while running.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownTask(_) | Error::InvalidArgument(_)
        )
    }
}
