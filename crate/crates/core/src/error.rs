use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix exponential argument too large (norm {norm:e})")]
    Overflow { norm: f64 },

    #[error("operator is not certifiably diagonalizable (eigenvector condition number {condition:e})")]
    NotDiagonalizable { condition: f64 },

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("infinite horizon cannot be certified: {0}")]
    TailNotCertifiable(String),

    #[error("series does not converge: {0}")]
    Convergence(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("system is not exactly observable (c1 = {c1:e}, threshold = {threshold:e})")]
    NotObservable { c1: f64, threshold: f64 },

    #[error("spectral domain violated at indices {indices:?}: {reason}")]
    Domain { reason: String, indices: Vec<usize> },

    #[error("guard |1 + lambda| > {epsilon:e} violated at indices {indices:?}")]
    GuardViolation { epsilon: f64, indices: Vec<usize> },

    #[error("operator is not self-adjoint (||A - A*|| = {defect:e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("operator norm {norm} is not below one")]
    NotStronglyStable { norm: f64 },
}

impl Error {
    /// True for failures of a numerical certificate, as opposed to bad input.
    pub fn is_certificate_failure(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NotDiagonalizable { .. }
                | Error::Quadrature(_)
                | Error::TailNotCertifiable(_)
                | Error::Convergence(_)
                | Error::NotStronglyStable { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
