use thiserror::Error;

/// Failure modes shared by every numeric routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence after {terms} terms: {what}")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("pole: {0}")]
    Pole(String),
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error("zero denominator factor at term {0}")]
    ZeroDenominator(usize),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("root {root} outside ({lo}, {hi})")]
    RootNotInInterval { root: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
