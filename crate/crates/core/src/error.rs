use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero distance between source {src} and destination {dst}")]
    ZeroDistance { src: usize, dst: usize },

    #[error("link id {id} out of range for a network of {n} links")]
    LinkOutOfRange { id: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("exact solver refuses n = {n} (cap is {cap})")]
    CapExceeded { n: usize, cap: usize },

    #[error("link {0} is not active in the schedule")]
    InactiveLink(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid priority order: {0}")]
    InvalidPriority(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
