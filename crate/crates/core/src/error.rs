use thiserror::Error;

/// Errors raised by the library. Parse errors carry 1-based line/column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("matrix uses ZERO but component {component} has no basepoint")]
    MissingBasepoint { component: usize },
    #[error("universe size {size} exceeds cap {cap}")]
    UniverseCap { size: usize, cap: usize },
    #[error("unknown builtin matrix `{0}`")]
    UnknownMatrix(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
