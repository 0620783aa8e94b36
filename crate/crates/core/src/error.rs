use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point {0:?} lies outside the grid")]
    OutsideGrid(Vec<f64>),
    #[error("direction is not a unit vector (|omega| = {0})")]
    NonUnitDirection(f64),
    #[error("CFL violation: dt = {dt} exceeds limit {limit} for h = {h}")]
    CflViolation { dt: f64, limit: f64, h: f64 },
    #[error("grid halo too small: need half-width >= {required}, have {have}")]
    InsufficientHalo { required: f64, have: f64 },
    #[error("surface {0} does not lie in the field's region")]
    SurfaceOutsideRegion(String),
    #[error("cone extrapolation distance {cells:.1} cells exceeds the 4-cell limit")]
    ExtrapolationTooFar { cells: f64 },
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("empty admissible interval: requires T > 6, got T = {0}")]
    EmptyAdmissibleInterval(f64),
    #[error("non-positive level-set gap: min(good) = {good_min}, max(bad) = {bad_max}")]
    NonPositiveGap { good_min: f64, bad_max: f64 },
    #[error("degenerate weight gradient at sample {0:?}")]
    DegenerateGradient(Vec<f64>),
    #[error("infeasible cutoff support constraints: {0}")]
    InfeasibleCutoff(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed WVF1 stream: {0}")]
    BadWvf1(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
