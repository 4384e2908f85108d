use thiserror::Error;

/// Errors surfaced by the library API.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid bounds at coordinate {index}: lower {lower} must be below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooSmall { min: usize, found: usize },
    #[error("unknown benchmark id `{0}`")]
    UnknownId(String),
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("translation direction is undefined when best equals previous best")]
    DegenerateDirection,
    #[error("objective declares no target value")]
    MissingTarget,
    #[error("input must not be empty")]
    EmptyInput,
    #[error("samples need at least {min} values each")]
    TooFewSamples { min: usize },
    #[error("all samples are identical")]
    DegenerateSamples,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("evaluation budget exhausted")]
    BudgetExhausted,
    #[error("i/o failure: {0}")]
    Io(String),
}

/// Reason a search stopped before finishing its current step.
///
/// Search routines take the incumbent by `&mut` so that the best solution
/// found so far is always preserved when one of these propagates.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum Halt {
    #[error("evaluation budget exhausted")]
    BudgetExhausted,
    #[error("target objective value reached")]
    OptimumFound,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
