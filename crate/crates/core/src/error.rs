use thiserror::Error;

/// Failure modes shared by every operation in the crate.
///
/// `Horizon` is not a bug: it means a query about an infinite object ran past
/// the finite part that was materialized (a window edge, a search cap, the
/// deepest precomputed hierarchy level). Callers may retry with a larger
/// window.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("horizon exceeded: {0}")]
    Horizon(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("certificate contradicted: {0}")]
    Contradiction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn horizon(msg: impl Into<String>) -> Self {
        Error::Horizon(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn is_horizon(&self) -> bool {
        matches!(self, Error::Horizon(_))
    }
}
