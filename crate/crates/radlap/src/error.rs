use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operator family / parameter combination not admitted.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// Evaluation point outside the operator's underlying set.
    #[error("point {point} outside domain of {family}")]
    OutOfDomain { family: &'static str, point: f64 },

    /// Kernel evaluation requested too close to the diagonal.
    #[error("diagonal evaluation rejected: |x-y| = {gap:.3e} below threshold")]
    Diagonal { gap: f64 },

    /// The junction-delta coupling ratio has a pole inside the requested range.
    #[error("coupling denominator vanishes near lambda = {lambda:.6e}")]
    Pole { lambda: f64 },

    /// An iterative scheme failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A sampled quantity violated a structural property it must satisfy.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// Grid does not match the operator or request.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Invalid experiment configuration.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}
