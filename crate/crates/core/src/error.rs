use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Domain(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("truncation overflow: {0}")]
    Overflow(String),
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("obstruction: {0}")]
    Obstruction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
