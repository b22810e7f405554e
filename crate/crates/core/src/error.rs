use thiserror::Error;

use crate::factor::Location;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("enumeration of {states} states exceeds the budget of {budget} (raise NFG_DUAL_BUDGET or shrink the model)")]
    BudgetExceeded { states: u128, budget: u64 },

    #[error("mapping is singular at {location}: factor entry {index} is zero")]
    SingularMap { location: Location, index: usize },

    #[error("location mismatch: marginal at {marginal}, factor at {factor}")]
    LocationMismatch { marginal: Location, factor: Location },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("degenerate message at {0}: all entries cancelled to zero")]
    DegenerateMessage(Location),

    #[error("sampler refused: {0}")]
    SamplerRefused(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is not positive definite (pivot {0})")]
    NotPositiveDefinite(usize),

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
