use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value violates its invariants, or sampling a world
    /// from it failed.
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was invoked in a state where it is not allowed.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
