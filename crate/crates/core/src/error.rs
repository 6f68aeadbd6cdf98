//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by state construction, measurement statistics and the
/// Bell-operator machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input is well-formed but lies outside the domain the operation
    /// is defined on (e.g. an attack applied to a state whose spied block
    /// leaves the all-zero/all-one span).
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// The request exceeds a documented size cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedInput(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::ResourceLimit(msg.into())
    }
}
