use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate metric at {point:?}")]
    DegenerateMetric { point: Vec<f64> },

    #[error("point {point:?} is outside the chart domain: {reason}")]
    ChartDomain { point: Vec<f64>, reason: String },

    #[error("boundary/k mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("domain excludes metric singularity: {0}")]
    MetricSingularity(String),

    #[error("basis unknown; supply potentials explicitly ({0})")]
    BasisUnknown(String),

    #[error("metric `{0}` has no analytic derivatives; use the central-difference scheme")]
    NoAnalyticDerivatives(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent mass integral: {0}")]
    Divergent(String),

    #[error("mass not defined for these conformal data: {0}")]
    BoundaryConditions(String),

    #[error("not a Lorentz transformation: {0}")]
    NotLorentz(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
