use thiserror::Error;

/// Errors raised by the kernel.
///
/// Variants are grouped so callers (the CLI in particular) can map them onto
/// coarse failure classes: [`GtbError::is_validation`] covers bad input data,
/// everything else is a numerical failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GtbError {
    #[error("negative base {0} passed to a real power")]
    NegativeBase(f64),
    #[error("zero base raised to negative exponent {0}")]
    Singularity(f64),
    #[error("knot set invalid: {0}")]
    InvalidKnots(String),
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
    #[error("parameter {0:?} lies outside the domain")]
    OutsideDomain(Vec<f64>),
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what}[{index}] must be positive, got {value}")]
    NonPositive {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("matrix dimension {0} too large for brute-force minors")]
    TooLarge(usize),
    #[error("no convergence after {iterations} iterations, last residual {last_residual:e}")]
    NoConvergence {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },
    #[error("degenerate tangent: {0}")]
    DegenerateTangent(String),
    #[error("empty intersection: {0}")]
    EmptyIntersection(String),
}

impl GtbError {
    /// True for errors caused by malformed input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GtbError::NegativeBase(_)
                | GtbError::InvalidKnots(_)
                | GtbError::DegenerateHull(_)
                | GtbError::OutsideDomain(_)
                | GtbError::LengthMismatch { .. }
                | GtbError::NonPositive { .. }
                | GtbError::Precondition(_)
                | GtbError::IndexOutOfRange { .. }
                | GtbError::TooLarge(_)
                | GtbError::DegenerateTangent(_)
                | GtbError::EmptyIntersection(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GtbError>;
