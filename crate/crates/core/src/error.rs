use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        value: String,
    },

    #[error("{path}: row {row} has {found} columns, expected at least {expected}")]
    ShortRow {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("{0}: no rows left after removing rows with missing values")]
    NoRows(String),

    #[error("invalid dataset spec {name}: {reason}")]
    InvalidSpec { name: String, reason: String },

    #[error("fold count {k} out of range for {n} samples (need 2 <= k <= n)")]
    InvalidFoldCount { k: usize, n: usize },

    #[error("fold {fold} out of range for a {k}-fold plan")]
    FoldOutOfRange { fold: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("prediction {value} outside training target range [{min}, {max}]")]
    BoundViolation { value: f64, min: f64, max: f64 },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed results file: {0}")]
    Format(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
