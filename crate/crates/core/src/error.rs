use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("step {0} exceeds the supported maximum of 3")]
    StepTooLarge(usize),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("coordinate kinds differ")]
    KindMismatch,

    #[error("operation is only implemented for the built-in Engel instance")]
    UnsupportedAlgebra,

    #[error("dilation factor must be positive, got {0}")]
    InvalidDilation(f64),

    #[error("empty time grid")]
    EmptyGrid,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite control value at t = {0}")]
    NonFiniteControl(f64),

    #[error("need at least {needed} grid points, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("curves are sampled on different grids")]
    GridMismatch,

    #[error("curve carries no derivative samples")]
    MissingDerivatives,

    #[error("scale parameter must be positive, got {0}")]
    InvalidEta(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("direction ({a}, {b}) lies in span(X2); the family is not pliable there")]
    SingularDirection { a: f64, b: f64 },

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("fragment is not admissible: {0}")]
    NotAdmissible(String),

    #[error("steering failed on gap {gap} ({start}, {end}): {reason}")]
    SteeringFailed {
        gap: usize,
        start: f64,
        end: f64,
        reason: String,
    },

    #[error("invalid fragment: {0}")]
    InvalidFragment(String),

    #[error("the set where the curve leaves span(X2) is empty at grid scale")]
    EmptyS,

    #[error("curve is not degenerate: |u1({t})| = {u1:e} exceeds the direction threshold")]
    NotDegenerate { t: f64, u1: f64 },
}

impl Error {
    /// Stable machine-readable code, used by the CLI error report.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::StepTooLarge(_) => "STEP_TOO_LARGE",
            Error::InvalidAlgebra(_) => "INVALID_ALGEBRA",
            Error::KindMismatch => "KIND_MISMATCH",
            Error::UnsupportedAlgebra => "UNSUPPORTED_ALGEBRA",
            Error::InvalidDilation(_) => "INVALID_DILATION",
            Error::EmptyGrid => "EMPTY_GRID",
            Error::InvalidGrid(_) => "INVALID_GRID",
            Error::NonFiniteControl(_) => "NON_FINITE_CONTROL",
            Error::TooFewPoints { .. } => "TOO_FEW_POINTS",
            Error::GridMismatch => "GRID_MISMATCH",
            Error::MissingDerivatives => "MISSING_DERIVATIVES",
            Error::InvalidEta(_) => "INVALID_ETA",
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::SingularDirection { .. } => "SINGULAR_DIRECTION",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::NotAdmissible(_) => "NOT_ADMISSIBLE",
            Error::SteeringFailed { .. } => "STEERING_FAILED",
            Error::InvalidFragment(_) => "INVALID_FRAGMENT",
            Error::EmptyS => "EMPTY_S",
            Error::NotDegenerate { .. } => "NOT_DEGENERATE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
