//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Basis matrix is singular or too close to singular for reliable use.
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    /// Operation not available in the requested dimension.
    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    /// Input violates a structural precondition (shift in lattice, bad density, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A truncated series or lattice sum could not meet the requested tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed configuration string or JSON.
    #[error("parse error: {0}")]
    Parse(String),

    /// An iterative minimizer did not converge; the message carries the best iterate.
    #[error("optimization failure: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
