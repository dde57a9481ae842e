use thiserror::Error;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}: only n = 2 and n = 3 are implemented")]
    Dimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("multi-index {0:?} has order greater than 2")]
    MultiIndexOrder(Vec<usize>),

    #[error("second-order coefficient for multi-index {0:?} is not real (symmetry requirement violated)")]
    Symmetry(Vec<usize>),

    #[error(
        "operator is not elliptic: inf over the unit sphere of xi^t a2 xi is {margin:e} \
         (the following ellipticity assumption requires it to be > {threshold:e})"
    )]
    Ellipticity { margin: f64, threshold: f64 },

    #[error("principal coefficient matrix is not positive definite (pivot {pivot} = {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("evaluation at the singular point x = 0")]
    SingularPoint,

    #[error("unsupported operator for a closed-form fundamental solution: {0}")]
    UnsupportedOperator(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0:?} lies within the near-boundary band of the domain")]
    NearBoundary(Vec<f64>),

    #[error("point {0:?} is not strictly inside the domain")]
    NotInterior(Vec<f64>),

    #[error("point {0:?} lies inside the support hull")]
    InsideSupport(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inconsistent samples: point {0:?} occurs with different values")]
    InconsistentSample(Vec<f64>),

    #[error("kernel check failed: {0}")]
    Kernel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
