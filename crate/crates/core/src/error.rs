use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { what: String, min_eigenvalue: f64 },

    /// The two-phase inverse average is singular once `c` reaches `sigma2`;
    /// the finite limit is available through [`crate::tensor::limit_tensor`].
    #[error("inverse average singular at c = {c} (requires c < sigma2 = {sigma2}); use limit_tensor for the c -> sigma2 limit")]
    SingularAverage { c: f64, sigma2: f64 },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("neumann data incompatible: component {component} has net flux {net_flux:e}")]
    IncompatibleNeumann { component: usize, net_flux: f64 },

    #[error("measurements are degenerate: condition number of <E> is {condition:e}")]
    MeasurementDegeneracy { condition: f64 },

    #[error("data inconsistency: {0}")]
    DataInconsistency(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
