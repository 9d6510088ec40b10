use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the kernel.
#[derive(Debug, Error)]
pub enum LarError {
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value {value} at ({row}, {col}) does not fit in an 8-bit signed entry")]
    Overflow { row: usize, col: usize, value: i64 },

    #[error("degenerate cell {cell}: {reason}")]
    Degenerate { cell: usize, reason: String },

    #[error("chain is not closed: boundary has {nonzeros} nonzero entries")]
    NotClosed { nonzeros: usize },

    #[error("missing cell table for dimension {0}")]
    MissingTable(usize),

    #[error("hinge {hinge} has {petals} incident cells; the skeleton is open")]
    OpenHinge { hinge: usize, petals: usize },

    #[error("cell {cell} is not incident to hinge {hinge}")]
    NotInFan { hinge: usize, cell: usize },

    #[error("gift wrapping failed at cell {cell}: {reason}")]
    Wrapping { cell: usize, reason: String },

    #[error("point too close to a shell boundary: {0}")]
    Ambiguous(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LarError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LarError {
    let path = path.into();
    move |source| LarError::Io { path, source }
}
