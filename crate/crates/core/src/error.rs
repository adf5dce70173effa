//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, estimation and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested model identifier is not in the catalog.
    #[error("unknown model `{0}`")]
    UnknownModel(String),

    /// A parameter point violates the model rectangle or support rules.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A configuration value is out of its admissible range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: residual error {error:.3e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence { error: f64, subdivisions: usize },

    /// A search loop exceeded its iteration cap, which signals a
    /// non-contracting radius rule rather than a transient condition.
    #[error("iteration cap of {cap} exceeded in {stage}")]
    IterationCapExceeded { stage: &'static str, cap: usize },

    /// The requested operation needs a capability the model does not have.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A theory-side calculator was invoked with t = 0 (practice mode).
    #[error("theory mode required: all grid parameters t_j must be positive")]
    TheoryModeRequired,

    /// Sample data failed validation.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// File I/O failure while reading or writing sample/report files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
