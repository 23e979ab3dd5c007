use thiserror::Error;

/// Errors raised by the simulator, the probe engine and the diagnosis engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration object violated one of its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The sweep data does not support the requested inference.
    #[error("undiagnosable: {0}")]
    Undiagnosable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn undiagnosable(msg: impl Into<String>) -> Error {
    Error::Undiagnosable(msg.into())
}
