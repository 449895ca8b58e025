use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("points must be a power of two and at least 8, got {0}")]
    BadPoints(usize),
    #[error("length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("{0} is not a dyadic integer >= 2")]
    NotDyadic(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("scheme {scheme} cannot integrate the {model} model (projected nonlinearity)")]
    SchemeMismatch { scheme: &'static str, model: &'static str },
    #[error("non-finite state after step {step} (t = {time}); reduce dt or the data size")]
    NonFinite { step: usize, time: f64 },
    #[error("no low-mass window: best residual {best:.3e} exceeds eps = {eps:.3e}")]
    NoLowMassWindow { best: f64, eps: f64 },
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
