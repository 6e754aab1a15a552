//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by estimators, distribution builders, tests, and simulators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The request exceeds a hard capacity bound (enumeration or state-space caps).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The requested statistic does not exist for the given input
    /// (an empty selection set, for example).
    #[error("statistic undefined: {0}")]
    Undefined(String),

    /// Every replication or every stratum was discarded, leaving nothing to test.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Malformed input data (parse failures, inconsistent tables).
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn undefined(msg: impl Into<String>) -> Self {
        Error::Undefined(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
