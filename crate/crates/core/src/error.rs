use thiserror::Error;

/// Errors raised by the measure-theoretic operations and the file formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("space mismatch")]
    SpaceMismatch,

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid scalar {0:?}: expected an integer or \"p/q\"")]
    InvalidScalar(String),

    #[error("enumeration too large: {count} tuples exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("arguments must be pairwise disjoint")]
    NotDisjoint,

    #[error("invalid grade {0}: grade must be at least {1}")]
    InvalidGrade(usize, usize),

    #[error("invalid slot {slot} for rank {rank}")]
    InvalidSlot { slot: usize, rank: usize },

    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("partial table: no entry for cylinder ({0})")]
    PartialTable(String),

    #[error("duplicate entry for {0}")]
    DuplicateEntry(String),

    #[error("diagonal requires equal factors")]
    UnequalFactors,

    #[error("symmetrize first: polymeasure is not symmetric")]
    NotSymmetric,

    #[error("not a grade-2 measure: diagonal of the reconstruction differs from the input")]
    NotGrade2,

    #[error("invalid fixing: {0}")]
    InvalidFixing(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("too many sign patterns for exact semivariation ({patterns} > {limit}); use sampled mode")]
    SemivariationGuard { patterns: u128, limit: u128 },

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("marginal defined for the full-mass model")]
    NotFullCube,
}

pub type Result<T> = core::result::Result<T, Error>;
