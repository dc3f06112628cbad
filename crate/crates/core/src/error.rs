use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (entry ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },

    #[error("banded matrix has a nonzero entry outside bandwidth {bandwidth} at ({row}, {col})")]
    OutsideBand { bandwidth: usize, row: usize, col: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("circulant embedding has a negative eigenvalue {value:e} at index {index}")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("constraint normal is the zero vector")]
    ZeroNormal,

    #[error("polynomial coefficients are all zero")]
    DegenerateAllZero,

    #[error("quartic root polish failed to reach residual {residual:e}")]
    QuarticSolverFailure { residual: f64 },

    #[error("product constraint {constraint} has a non-positive factor {factor} at the start point")]
    MixedSignProduct { constraint: usize, factor: usize },

    #[error("initial point violates constraint {constraint} (value {value:e})")]
    InfeasibleInit { constraint: usize, value: f64 },

    #[error("state violates constraint {constraint} (value {value:e})")]
    InfeasibleState { constraint: usize, value: f64 },

    #[error("more than {limit} reflections in a single iteration")]
    BounceLimitExceeded { limit: usize },

    #[error("more than {limit} events in a single lasso iteration")]
    EventLimitExceeded { limit: usize },

    #[error("empty conditional interval for coordinate {coordinate}: [{lower}, {upper}]")]
    EmptyConditionalInterval { coordinate: usize, lower: f64, upper: f64 },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("series is too short ({len} values)")]
    SeriesTooShort { len: usize },

    #[error("a flat prior (infinite variance) leaves the precision matrix singular")]
    DegeneratePrior,

    #[error("gibbs baseline supports linear constraints only (constraint {constraint})")]
    UnsupportedConstraint { constraint: usize },

    #[error("no interior point found (best minimum slack {slack:e})")]
    NoInteriorPoint { slack: f64 },
}
