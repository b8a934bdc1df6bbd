use thiserror::Error;

use crate::setfn::SubsetId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 1..=16")]
    InvalidGroundSet(usize),

    #[error("subset {0} does not belong to a ground set of size {1}")]
    SubsetOutOfRange(u32, usize),

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("ground set mismatch: {0} vs {1}")]
    GroundMismatch(usize, usize),

    #[error("value of {0} is not observable (not in the known mask)")]
    Unobservable(SubsetId),

    #[error("cannot normalize: f(N) equals the sum of singleton values")]
    DegenerateNormalization,

    #[error("incomplete function is not extendable: lower {lower} > upper {upper} at {set}")]
    NotExtendable {
        set: SubsetId,
        lower: f64,
        upper: f64,
    },

    #[error("known values of cardinality {0} differ")]
    NotSymmetric(usize),

    #[error("known sets {0} and {1} share an additive value but differ in f")]
    Inconsistent(SubsetId, SubsetId),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("fractional cover infeasible: element {0} is in no candidate")]
    Infeasible(usize),

    #[error("linear program is infeasible")]
    InfeasibleLp,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("{what}: size {size} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("negative values are not supported here")]
    NegativeValues,

    #[error("no extension found after {0} restarts")]
    NotFound(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
