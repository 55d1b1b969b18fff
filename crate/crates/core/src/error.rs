use thiserror::Error;

/// Errors raised by the workbench.
///
/// Variants split into caller mistakes (bad configuration, malformed input)
/// and internal-consistency failures, which mean a computed object violated
/// an invariant that the mathematics guarantees.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),

    #[error("entry {entry} has negative {prime}-adic valuation")]
    NonIntegral { entry: String, prime: u32 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight mismatch: {left} has weight {left_weight}, {right} has weight {right_weight}")]
    WeightMismatch {
        left: String,
        left_weight: u64,
        right: String,
        right_weight: u64,
    },

    #[error("weight {weight} exceeds the table bound {bound}")]
    WeightExceedsBound { weight: u64, bound: u64 },

    #[error("operation has non-zero degree shift {0}")]
    NonZeroDegree(u64),

    #[error("{monomial} lies in J_{height}")]
    InIdeal { monomial: String, height: u32 },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("stabilization not reached: {0}")]
    NotStabilized(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cache mismatch: {0}")]
    CacheMismatch(String),

    #[error("malformed cache file: {0}")]
    MalformedCache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
