use thiserror::Error;

use crate::geometry::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The generic resolvent solver ran out of iterations. Carries the best
    /// iterate found so the caller can inspect it.
    #[error(
        "resolvent solver did not reach tolerance {tol:e} after {iters} iterations (best certified gap {gap:e})"
    )]
    ConvergenceFailure {
        best: Point,
        gap: f64,
        iters: usize,
        tol: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
