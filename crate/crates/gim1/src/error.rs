//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or queue parameter violates its constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to converge; achieved error estimate {achieved:.3e}")]
    QuadratureFailure { achieved: f64 },

    /// A requested moment does not exist for the model.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// An iterative solver ran out of iterations.
    #[error("no convergence after {iterations} iterations; last iterate {last}")]
    NonConvergence { iterations: u64, last: f64 },

    /// An asymptotic formula was requested outside its regime of validity.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// The recurrence produced a table that violates its invariants.
    #[error("corrupted loss table: {0}")]
    CorruptedTable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
