use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// A configuration the method does not handle, such as a non-generic
    /// endomorphism or a vanishing eliminant; the caller skips it.
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("no suitable object found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
