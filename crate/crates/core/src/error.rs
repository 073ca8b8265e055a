use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the geometry and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields are defined on different grids")]
    GridMismatch,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("singular Möbius matrix (determinant {0:e})")]
    SingularMobius(f64),

    #[error("log-density closure is inconsistent at z = {z}: stored derivative {stored}, numerical {estimate}")]
    ClosureMismatch {
        z: Complex64,
        stored: Complex64,
        estimate: Complex64,
    },

    #[error("holomorphic map has vanishing derivative at z = {z}")]
    VanishingDerivative { z: Complex64 },

    #[error("tensor is singular at grid index {index} (z = {z})")]
    SingularTensor { index: usize, z: Complex64 },

    #[error("Epstein surface degenerates at grid index {index} (z = {z})")]
    DegenerateSurface { index: usize, z: Complex64 },

    #[error("{name} = {value} is outside its domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid model surface: {0}")]
    InvalidSurface(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "Newton iteration did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linearized operator lost invertibility: {0}")]
    Ellipticity(String),

    #[error("continuation failed at k = {k}: {source}")]
    Continuation {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("branch sample at k = {k} is not converged (residual {residual:e})")]
    Unconverged { k: f64, residual: f64 },

    #[error("branch invariant violated: {0}")]
    BranchInvariant(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("Re(phi) and Im(phi) have a degenerate Gram matrix")]
    DegeneratePhi,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The innermost error, looking through continuation annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Continuation { source, .. } => source.root(),
            other => other,
        }
    }
}
