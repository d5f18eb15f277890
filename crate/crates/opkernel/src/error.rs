use thiserror::Error;

/// Errors raised by kernel operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the mathematical data was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation was requested beyond the truncation bound of a sequence.
    #[error("truncation exceeded: arity {arity} > bound {bound}")]
    Truncation { arity: usize, bound: usize },

    /// Objects or morphisms from different backends were mixed.
    #[error("mixed backends: {0}")]
    MixedBackends(String),

    /// The backend does not support the requested capability.
    #[error("capability error: {0}")]
    Capability(String),

    /// A map that was required to be a bijection is not one.
    #[error("not a bijection: {0}")]
    NonBijective(String),

    /// Malformed input data (files, JSON payloads).
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
