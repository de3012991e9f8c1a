use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree overflow: {p} + {q} exceeds dimension {dim}")]
    DegreeOverflow { p: usize, q: usize, dim: usize },

    #[error("invalid degree {degree} for operation `{op}`")]
    InvalidDegree { degree: usize, op: &'static str },

    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("3-form is not a positive G2 structure: {0}")]
    NotG2(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("link spectrum covers eigenvalues up to {ceiling}, {needed} required")]
    InsufficientSpectrum { ceiling: String, needed: String },

    #[error("interval endpoint {0} is a critical rate")]
    CriticalEndpoint(String),

    #[error("rate table does not cover region `{0}`")]
    UncoveredRegion(String),

    #[error("cannot invert the Laplacian on the zero mode")]
    ZeroMode,

    #[error("iteration did not converge within {0} steps")]
    MaxIterations(usize),

    #[error("fit needs at least 3 usable points, got {0}")]
    DegenerateFit(usize),

    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
