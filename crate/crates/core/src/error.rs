use thiserror::Error;

use crate::geometry::DiskPoint;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("pseudohyperbolic radius {0} is outside (0, 1)")]
    InvalidRadius(f64),

    #[error("harnack interval needs 0 <= r < 1, got {0}")]
    HarnackDomain(f64),

    #[error("majorant constant {0} is below log 3")]
    MajorantNormalization(f64),

    #[error("invalid majorant: {0}")]
    InvalidMajorant(String),

    #[error("not a zero of the product: {0}")]
    NotAZero(DiskPoint),

    #[error("point {0} is not in the sequence")]
    NotInSequence(DiskPoint),

    #[error("tuple not in Λ^n: repeated point {0}")]
    TupleNotDistinct(DiskPoint),

    #[error("duplicate point {0} in sequence")]
    DuplicatePoint(DiskPoint),

    #[error("missing value for point {0}")]
    MissingValue(DiskPoint),

    #[error("sequence carries no values")]
    NoValues,

    #[error("sequence carries no subsequence labels")]
    NoLabels,

    #[error("enumeration of {needed} tuples exceeds budget {budget}; raise the budget or subsample")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("order {n} exceeds the configured cap {cap}")]
    OrderCap { n: usize, cap: usize },

    #[error("need at least {needed} points, have {have}")]
    TooFewPoints { needed: usize, have: usize },

    #[error("count condition fails: {count} points in the disk around {witness}, allowed {allowed}")]
    CountCondition {
        count: usize,
        allowed: usize,
        witness: DiskPoint,
    },

    #[error("part {part} is not separated: {a} and {b}")]
    NotSeparated {
        part: usize,
        a: DiskPoint,
        b: DiskPoint,
    },

    #[error("majorant value {value} at {at} is below the floor log 8")]
    MajorantFloor { value: f64, at: DiskPoint },

    #[error("covering radius underflowed at {0}; majorant too large for double precision")]
    RadiusUnderflow(DiskPoint),

    #[error("sequence too separated to build counterexample")]
    NoCounterexample,

    #[error("parts are not disjoint: {0} appears twice")]
    PartsOverlap(DiskPoint),

    #[error("node {0} lies on the zero set of an earlier stage")]
    NodeOnZeroSet(DiskPoint),

    #[error("covering disk around {center} meets part {part} in more than one point")]
    CoveringMultiplicity { center: DiskPoint, part: usize },

    #[error("step {step}: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
