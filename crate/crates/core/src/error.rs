use alloc::string::String;
use alloc::vec::Vec;

use crate::solver::TraceRow;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar or vector argument is out of range or not finite.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors live in different spaces")]
    SpaceMismatch,

    /// An operator, set or basis violates a structural requirement
    /// (rank, orthonormality, adjoint shape, tight-frame identity).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("rank deficiency: {0}")]
    Rank(String),

    /// The catalog has no closed form for the requested combination.
    #[error("catalog error: {0}")]
    Catalog(String),

    /// A value or conjugate-value evaluation was requested from a function
    /// that does not provide it.
    #[error("capability missing: {0}")]
    Capability(&'static str),

    #[error("{what} did not reach tolerance (residual {residual:e})")]
    Numerical { what: &'static str, residual: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An iterate became non-finite. The trace up to that point is attached.
    #[error("iteration diverged at step {iteration}")]
    Divergence {
        iteration: usize,
        trace: Vec<TraceRow>,
    },

    /// The grid oracle's minimizer sits on the boundary of the scanned range.
    #[error("grid range too small: minimizer on the boundary of dimension {dim}")]
    RangeTooSmall { dim: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
