use thiserror::Error;

/// Errors produced by the optimizer library.
#[derive(Debug, Error)]
pub enum Error {
    /// A text input failed to parse. `line` and `column` are 1-based; a
    /// column of 0 means the whole line.
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown point id {0}")]
    UnknownPoint(usize),

    #[error("objective {index} evaluated to non-finite value {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// All candidate points coincide in decision space, so no axis can be
    /// drawn between them.
    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
