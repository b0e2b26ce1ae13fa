use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Identity checks that fail are reported through [`Error::Violation`];
/// they indicate either a bug or a wrong input, never a tunable condition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("could not certify {what} at {digits} digits")]
    PrecisionExhausted { what: String, digits: u32 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("identity violated: {0}")]
    Violation(String),

    #[error("unknown fact id `{0}`")]
    UnknownFact(String),

    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
