use thiserror::Error;

use crate::problems::ProblemKind;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("solution kind does not match instance kind (expected {expected}, got {got})")]
    KindMismatch { expected: &'static str, got: ProblemKind },
    #[error("unknown problem kind `{0}`")]
    UnknownProblem(String),
    #[error("index {index} out of range ({what})")]
    InvalidIndex { what: &'static str, index: usize },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dynamic-programming work bound exceeded ({cells} cells > {bound})")]
    WorkBoundExceeded { cells: u128, bound: u128 },
    #[error("instance too large for exact search ({detail})")]
    TooLarge { detail: String },
    #[error("instance is infeasible: {0}")]
    InfeasibleInstance(String),
    #[error("Johnson's rule requires exactly 2 machines, got {0}")]
    NotTwoMachines(usize),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("size {value} for `{param}` is outside the supported grid (use permissive mode to override)")]
    NotInGrid { param: &'static str, value: usize },
    #[error("target bin count {target} exceeds item count {items}")]
    InfeasibleSpec { target: usize, items: usize },
    #[error("solver failed while labeling an instance: {0}")]
    Solve(#[from] SolveError),
    #[error("generated record failed self-validation: {0}")]
    ValidationFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed text at line {line}, column {col}: expected {expected}")]
    Malformed { line: usize, col: usize, expected: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("oracle value must be positive, got {0}")]
    NonpositiveOracle(i64),
    #[error("candidate source unavailable: {0}")]
    SourceUnavailable(String),
    #[error("candidate source timed out: {0}")]
    Timeout(String),
    #[error("malformed input at line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error)]
pub enum RouterError {
    #[error("sequence of {len} tokens exceeds the maximum length {max}")]
    SequenceTooLong { len: usize, max: usize },
    #[error("training corpus is missing class `{0}`")]
    MissingClass(ProblemKind),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("unsupported checkpoint version {0}")]
    CheckpointVersion(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
