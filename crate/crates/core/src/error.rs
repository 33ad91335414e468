use thiserror::Error;

/// Errors raised by grid construction, state preparation, propagation and
/// experiment orchestration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("grid mismatch between {0}")]
    GridMismatch(&'static str),

    #[error("wave function has zero norm")]
    ZeroNorm,

    #[error("wave packet does not fit the box: edge amplitude ratio {ratio:e} exceeds {limit:e}")]
    PacketTail { ratio: f64, limit: f64 },

    #[error("zero pivot in tridiagonal factorization at row {row}")]
    ZeroPivot { row: usize },

    #[error("classical trajectory entered the excluded region |x| < {radius} fm at t = {time} fm/c")]
    ExcludedRegion { radius: f64, time: f64 },

    #[error("boundary contamination for sigma = {sigma} fm at t = {time} fm/c: edge ratio {ratio:e}")]
    BoundaryContamination { sigma: f64, time: f64, ratio: f64 },

    #[error("degenerate turning-point fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
