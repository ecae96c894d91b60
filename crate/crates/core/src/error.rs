use thiserror::Error;

/// Errors produced by ranking, model, fitting, and I/O operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs disagree on universe size C or list length K.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An exhaustive computation would exceed its enumeration cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A value is outside the operation's domain (e.g. negative spread).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent arguments.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A file could not be parsed; carries the location of the offense.
    #[error("parse error in {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: u64,
        column: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
