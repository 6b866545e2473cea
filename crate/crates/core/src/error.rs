use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// The CLI maps [`WeaverError::Domain`] and [`WeaverError::Validation`] to
/// exit status 2 and [`WeaverError::Resource`] to exit status 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeaverError {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A request would exceed a memory or work cap.
    #[error("resource error: {0}")]
    Resource(String),
    /// Malformed or inconsistent input (component specs, parsed numbers).
    #[error("validation error: {0}")]
    Validation(String),
}

impl WeaverError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        WeaverError::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        WeaverError::Resource(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        WeaverError::Validation(msg.into())
    }
}

pub type Result<T, E = WeaverError> = std::result::Result<T, E>;
