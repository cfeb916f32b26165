use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ordering scheme violates {constraint}: residual {residual:e}")]
    InvalidOrdering { constraint: &'static str, residual: f64 },

    #[error("{system} has no exact solution for this ordering: {detail}")]
    NotExactlySolvable { system: String, detail: String },

    #[error("grid or point outside the physical domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("eigen-solver failed: {0}")]
    EigenSolver(String),

    #[error("trajectory escaped at t = {time} (|x| = {x:e}, |v| = {v:e})")]
    BlowUp { time: f64, x: f64, v: f64 },

    #[error("orbit is not periodic: {0}")]
    NonPeriodic(String),

    #[error("reduction unavailable for this ordering: {0}")]
    ReductionUnavailable(String),

    #[error("Bethe-ansatz solve failed: {reason} (best residual {best_residual:e})")]
    Bethe { reason: String, best_residual: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
