use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid data at row {row}, column {col}: {reason}")]
    InvalidCell {
        row: usize,
        col: usize,
        reason: String,
    },

    #[error("label length {got} does not match the number of rows {expected}")]
    LabelLength { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible distance measure: {0}")]
    IncompatibleMeasure(String),

    /// The data collapse to a single point; they form one cluster and
    /// no partition can be derived.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("average silhouette width is undefined for a single cluster")]
    AswUndefined,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
