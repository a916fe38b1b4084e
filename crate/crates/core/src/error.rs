use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("mode index {index} out of range for a {modes}-mode system")]
    ModeIndex { index: usize, modes: usize },

    #[error("matrix is not symmetric: |g[{row}][{col}] - g[{col}][{row}]| = {delta:e}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },

    #[error("non-physical covariance matrix: symplectic eigenvalue {value} < 1")]
    NonPhysical { value: f64 },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("degenerate measurement: {0}")]
    DegenerateMeasurement(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "key rate not converged in T: K(T) = {k_t}, K(T_check) = {k_check}, estimated bias {bias:e} > {tol:e}"
    )]
    NotConverged {
        k_t: f64,
        k_check: f64,
        bias: f64,
        tol: f64,
    },

    #[error("optimizer ambiguity: {reason}")]
    OptimizerAmbiguity {
        reason: String,
        scan: Vec<(f64, f64)>,
    },

    #[error("key rate is not monotone in excess noise: {0}")]
    NonMonotone(String),
}

pub type Result<T> = std::result::Result<T, Error>;
