use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index k = {k} out of range for dimension n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("dimension {n} not supported: {reason}")]
    Dimension { n: usize, reason: &'static str },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point lies outside the admissible cone")]
    ConeViolation,
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("evaluation at the pole of an inversion")]
    Pole,
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
