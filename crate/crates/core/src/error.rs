use thiserror::Error;

/// Errors produced by the segregation toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },
    #[error("coordinates and labels differ in length ({coords} vs {labels})")]
    LengthMismatch { coords: usize, labels: usize },
    #[error("points {first} and {second} share the coordinates ({x}, {y})")]
    DuplicatePoint {
        first: usize,
        second: usize,
        x: f64,
        y: f64,
    },
    #[error("point {index} at ({x}, {y}) lies outside the study region")]
    OutsideRegion { index: usize, x: f64, y: f64 },
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),
    #[error("label {label} at point {index} is out of range for {classes} classes")]
    LabelOutOfRange { index: usize, label: usize, classes: usize },
    #[error("no base points remain after edge correction")]
    NoBasePoints,
    #[error("invalid buffer width {width}: must lie in [0, {limit})")]
    InvalidBufferWidth { width: f64, limit: f64 },
    #[error("intensity must be positive, got {0}")]
    NonPositiveIntensity(f64),
    #[error("degrees of freedom must be at least 1")]
    InvalidDegreesOfFreedom,
    #[error("test requires exactly two classes, table has {0}")]
    RequiresTwoClasses(usize),
    #[error("table has a zero marginal total")]
    ZeroMarginal,
    #[error("moments need n >= 4, got {0}")]
    TooFewForMoments(usize),
    #[error("row sums add to {sum}, expected {n}")]
    RowSumMismatch { sum: usize, n: usize },
    #[error("cell ({0}, {1}) is outside the table")]
    CellOutOfRange(usize, usize),
    #[error("variance of cell ({0}, {1}) is zero")]
    ZeroVariance(usize, usize),
    #[error("covariance matrix of (N11, N22) is singular")]
    SingularCovariance,
    #[error("test statistic is constant over relabelings")]
    DegenerateStatistic,
    #[error("{0}")]
    InvalidSpec(String),
    #[error("{what} requires at least {min} replications, got {got}")]
    TooFewReplications { what: &'static str, min: usize, got: usize },
    #[error("test {0} is not applicable to this null model")]
    NotApplicable(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
