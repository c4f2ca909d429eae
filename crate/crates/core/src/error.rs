//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed sequence file at line {line}: {msg}")]
    Fasta { line: usize, msg: String },

    #[error("illegal character {ch:?} in record {record:?} at position {position}")]
    IllegalCharacter {
        record: String,
        position: usize,
        ch: char,
    },

    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sequence of length {len} is too short (minimum {min})")]
    SequenceTooShort { len: usize, min: usize },

    #[error("no valid triplet window (sequence too short or all windows contain N)")]
    NoValidWindow,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("distribution is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("undefined transition from pair {prev:?} at position {position}")]
    UndefinedTransition { prev: [char; 2], position: usize },

    #[error("posterior is undefined: all class likelihoods are zero")]
    UndefinedPosterior,

    #[error("sequence {0:?} is not a boundary point")]
    NotBoundaryPoint(String),

    #[error("classifier failed on neighbor {neighbor:?}: {source}")]
    Neighbor {
        neighbor: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
