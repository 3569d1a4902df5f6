use thiserror::Error;

/// Errors surfaced by the library.
///
/// Contract violations inside algorithm loops (out-of-range element ids,
/// taking the rightmost element of an empty set, asking for a circuit of an
/// independent set) panic instead: they indicate a bug in the caller, not a
/// recoverable condition.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fails its documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A model fails validation at construction time.
    #[error("model validation failed: {0}")]
    ModelValidation(String),

    /// An iterative solver did not converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An exhaustive checker was asked to enumerate beyond its cap.
    #[error("enumeration cap exceeded: {what} requires n <= {cap}, got n = {n}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        n: usize,
    },

    /// An instance file is malformed.
    #[error("instance parse error: {0}")]
    Parse(String),

    /// Algorithm tag and constraint kind do not match.
    #[error("incompatible algorithm/constraint: {0}")]
    Incompatible(String),

    /// A phase loop failed to terminate within its guard.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
