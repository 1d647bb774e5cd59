use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside chart domain: {0}")]
    OutsideDomain(String),
    #[error("metric matrix is not invertible at {0}")]
    Singular(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("finite-difference step underflow at coordinate {0}")]
    StepUnderflow(usize),
    #[error("point is not on the boundary face (last coordinate {0:e})")]
    NotOnBoundary(f64),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("chart mismatch: expected {expected}, got {got}")]
    ChartMismatch { expected: String, got: String },
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("radius {radius} lies inside r0 = {r0}")]
    BelowAsymptoticRegion { radius: f64, r0: f64 },
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("extrapolation: {0}")]
    Extrapolation(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("radius {r} is below the horizon margin {limit}")]
    InsideHorizon { r: f64, limit: f64 },
    #[error("decay validation failed: {0}")]
    Decay(String),
    #[error("conformally compact data: {0}")]
    ConformalData(String),
    #[error("spinor: {0}")]
    Spin(String),
    #[error("potential is not null: {0}")]
    NotNull(String),
    #[error("flow left the chart domain: {0}")]
    FlowLeftDomain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
