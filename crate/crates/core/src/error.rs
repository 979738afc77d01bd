use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("unsupported attribute type `{kind}` for attribute `{attribute}`")]
    UnsupportedAttribute { attribute: String, kind: String },

    #[error("no data rows")]
    EmptyData,

    #[error("dimension mismatch: expected d={expected}, got d={actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("labels must contain both inliers and outliers")]
    SingleClass,

    #[error("could not draw a split with both classes in the test part after {attempts} attempts")]
    RetriesExhausted { attempts: usize },

    #[error("model version mismatch: file has version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("insufficient memory: need about {needed} bytes, limit {limit} bytes")]
    Resource { needed: u64, limit: u64 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the file system rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
