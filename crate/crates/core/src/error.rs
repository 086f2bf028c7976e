use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value is outside the admissible domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested computation is larger than the configured guard allows.
    #[error("size guard: {what} ({actual} exceeds limit {limit})")]
    SizeGuard {
        what: &'static str,
        actual: u64,
        limit: u64,
    },

    /// A density matrix (or derived quantity) violates a physical invariant.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An operation needed at least one element.
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
