use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {lambda_min:e})")]
    NotPositiveDefinite { lambda_min: f64 },

    #[error("{what} did not converge within {limit} iterations")]
    IterationLimit { what: &'static str, limit: usize },

    #[error("bad index set {indices:?} for dimension {dim}")]
    BadIndexSet { indices: Vec<usize>, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("no diagonal entry is at or below the tolerance")]
    NoNonpositiveDiagonal,

    #[error("no diagonal entry exceeds the tolerance")]
    NoPositiveDiagonal,

    #[error("quadratic form is nowhere positive (largest symmetric eigenvalue {lambda_max:e})")]
    NoPositiveForm { lambda_max: f64 },

    #[error("matrix is not indefinite")]
    NotIndefinite,

    #[error("internal invariant broken: {0}")]
    IterationInvariantBroken(String),

    #[error("solution failed verification (primal {primal:e}, dual {dual:e}, complementarity {complementarity:e})")]
    VerificationFailed {
        primal: f64,
        dual: f64,
        complementarity: f64,
    },
}
