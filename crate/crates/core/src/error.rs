use thiserror::Error;

use crate::harness::CountRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite (leading minor {0} is not positive)")]
    NotPositiveDefinite(usize),
    #[error("malformed gram matrix: {0}")]
    MalformedGram(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("enumeration exceeded the cap of {cap} vectors; shrink the search bound")]
    TooManyVectors { cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("points live in different projective spaces (P^{0} vs P^{1})")]
    DimensionMismatch(usize, usize),
    #[error("the two points are equal")]
    EqualPoints,
    #[error("both points have height 1; pair freeness is undefined")]
    DegenerateHeight,
    #[error("log-height must be non-negative, got {0}")]
    NegativeHeight(f64),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("malformed point {0:?}")]
    MalformedPoint(String),
    #[error("survey budget of {limit} points exceeded; {} bound(s) completed", completed.len())]
    SurveyBudget { limit: usize, completed: Vec<CountRecord> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal a resource cap rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::TooManyVectors { .. } | Error::SurveyBudget { .. })
    }
}
