use thiserror::Error;

use crate::rational::RationalPoint;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("constraint system does not describe a bounded set")]
    Unbounded,
    #[error("point {0} lies outside the domain")]
    OutsideDomain(RationalPoint),
    #[error("point {0} lies on the boundary of the domain")]
    OnBoundary(RationalPoint),
    #[error("point {0} is not a vertex of the linearity complex")]
    NotAVertex(RationalPoint),
    #[error("domains differ")]
    DomainMismatch,
    #[error("expected {expected} functions, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("domain must be full-dimensional")]
    DegenerateDomain,
    #[error("convexity violated: f({mid}) = {f_mid} exceeds the average of f({a}) and f({b})")]
    NotConvex { a: RationalPoint, b: RationalPoint, mid: RationalPoint, f_mid: String },
    #[error("density is negative at x = {0} (value {1})")]
    NegativeDensity(String, String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow in exact lower-hull arithmetic")]
    Overflow,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
