use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} objectives, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("bag of size {0} exceeds the 32-vertex limit")]
    BagTooLarge(usize),

    #[error("graph has no spanning tree")]
    NoSpanningTree,

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("solution id {0} does not exist in the provenance log")]
    DanglingId(u64),

    #[error("provenance log needs recovery: {0}")]
    NeedsRecovery(String),

    #[error("store error: {0}")]
    Store(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    /// Whether the error stems from bad user input rather than an internal fault.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Store(_) | Error::NeedsRecovery(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
