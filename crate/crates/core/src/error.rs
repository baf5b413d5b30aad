use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("unknown architecture `{0}`")]
    UnknownArch(String),
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
    #[error("action component {index} = {value} outside [{low}, {high}]")]
    ActionOutOfBounds {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("derivative of a degree-0 basis is undefined")]
    ZeroDegreeDerivative,
    #[error("episode has ended; reset the environment first")]
    EpisodeOver,
    #[error("backward called without a matching forward cache ({0})")]
    StaleCache(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
