use thiserror::Error;

use crate::corpus::SentenceId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input JSON does not match the expected schema.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// Parsed input violates a data-model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("version mismatch: {0}")]
    VersionMismatch(String),

    #[error("alignment references unknown sentence {0}")]
    UnknownSentence(SentenceId),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("tree parse error at byte {position}: {message}")]
    TreeParse { position: usize, message: String },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// Prediction file problems, one entry per offending key.
    #[error("invalid predictions: {}", .0.join("; "))]
    Predictions(Vec<String>),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
