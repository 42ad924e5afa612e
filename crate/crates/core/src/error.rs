use thiserror::Error;

use crate::spaces::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(ValidationReport),

    #[error("{what} must be non-zero")]
    ZeroVector { what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("net dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("net would need {needed} points, limit is {limit}; increase delta")]
    NetTooLarge { needed: u128, limit: usize },

    #[error("functional {index} is not exposed in the dual ball: {reason}")]
    NotExposed { index: usize, reason: String },

    #[error("functional {index} has dual norm {dual_norm}, expected 1")]
    NotUnitDualNorm { index: usize, dual_norm: f64 },

    #[error("separation hypothesis violated at target point {index}: max functional value {value}")]
    SeparationViolated { index: usize, value: f64 },

    #[error("functionals are linearly dependent (rank {rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("norm family is not smooth; the n+1 construction requires lp with 1 < p < inf")]
    NonSmoothFamily,

    #[error("operation unsupported for this norm family: {0}")]
    UnsupportedFamily(&'static str),

    #[error("enumeration size {size} exceeds cap {cap}")]
    CombinatorialBlowup { size: u128, cap: u128 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("no smooth witness found within {n_max} sequence terms")]
    NotFoundWithin { n_max: usize },

    #[error("coverage certificate failed: min slack {min_slack} does not exceed net resolution {delta}; shrink delta")]
    CertificateFailed { min_slack: f64, delta: f64 },

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    /// True for failures that indicate a bug or tolerance conflict rather than
    /// bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Inconsistency(_) | Error::LinearProgram(_))
    }
}
