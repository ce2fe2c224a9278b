//! Error type shared by every module.

use thiserror::Error;

/// Failures surfaced by the solver toolkit. Infeasibility of a polytope or
/// instance is reported as a value by the individual operations, not here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("target set is empty")]
    EmptyTargets,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("level {level} out of range 1..={height}")]
    LevelOutOfRange { level: usize, height: usize },
    #[error("level {0} has a nonzero budget")]
    NonzeroBudget(usize),
    #[error("split value outside [0, B_l]")]
    BudgetOutOfRange,
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("empty collection")]
    EmptyCollection,
    #[error("no solution found")]
    NoSolutionFound,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
