use crate::words::Interval;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window not aligned to blocks of length {m}: offending boundary at {boundary}")]
    Alignment { m: u64, boundary: i64 },

    #[error("incomplete data: {0}")]
    IncompleteData(String),

    /// No admissible block length was found for level `level + 1`; `witness`
    /// is an interval whose S-count reaches `count >= threshold`.
    #[error("density violation extending level {level}: {count} elements of S in {witness} (need < {threshold})")]
    DensityViolation {
        level: usize,
        witness: Interval,
        count: u64,
        threshold: u64,
    },

    #[error("infeasible depth at level {level}: {reason}")]
    InfeasibleDepth { level: usize, reason: String },

    #[error("level-{level} block {block} is disjoint from S; increase the depth")]
    EmptyCore { level: usize, block: i64 },

    #[error("construction invariant broken at level {level}, block {block}: {reason}")]
    ConstructionInvariant {
        level: usize,
        block: i64,
        reason: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("p({n}) = {position} lies outside the window {window}")]
    OutOfRange {
        n: u64,
        position: i64,
        window: Interval,
    },

    #[error("unsupported format version {0:?}")]
    Version(String),

    #[error("checksum mismatch: header says {expected}, payload hashes to {actual}")]
    Checksum { expected: String, actual: String },

    #[error("inconsistent window file: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
