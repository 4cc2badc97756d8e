use thiserror::Error;

/// Errors raised by the library layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("inconsistent bound: {0}")]
    InconsistentBound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
