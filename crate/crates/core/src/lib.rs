//! Exact computations with Kakeya sets with respect to hyperplanes in `F_q^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: arithmetic in `F_q` for any prime power `q`, elements encoded
//!   as integers in `[0, q)`.
//! * [`geometry`]: points, hyperplane directions, affine hyperplanes, subspace
//!   enumeration and the subspace-counting formulas.
//! * [`pointset`]: bit-packed subsets of `F_q^n` and their JSON file format.
//! * [`kakeya`]: the Kakeya verifier, the union-of-hyperplanes construction and
//!   exact incidence statistics.
//! * [`bounds`]: exact rational lower bounds and the Cauchy-Schwarz counting
//!   inequality.
//! * [`search`]: exact minimum Kakeya set sizes by branch-and-bound.
//! * [`oracle`]: brute-force reference computations used by the self-test and
//!   the test suites.

pub mod bounds;
pub mod field;
pub mod geometry;
pub mod kakeya;
pub mod oracle;
pub mod pointset;
pub mod search;

mod limits;

pub use bounds::{cauchy_schwarz_count, dim2_known_bound, theorem1_bound, ExactRational};
pub use field::{make_field, parse_field, FieldSpec};
pub use geometry::{AffineHyperplane, Direction, Point, SubspaceBasis};
pub use kakeya::{IncidenceReport, OffsetAssignment, Verdict};
pub use limits::{enumeration_cap, set_size_cap, size_cap, DEFAULT_ENUMERATION_CAP, DEFAULT_SIZE_CAP};
pub use pointset::PointSet;
pub use search::SearchResult;

/// Field element, encoded as an integer in `[0, q)`.
pub type Elem = u32;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid field description {0:?}")]
    InvalidFieldSpec(String),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("{what} = {value} exceeds the size cap {cap}")]
    TooLarge { what: &'static str, value: u128, cap: u64 },
    #[error("element {elem} is out of range for a field of order {q}")]
    ElementOutOfRange { elem: u64, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension must be at least {min}, got {n}")]
    Dimension { n: usize, min: usize },
    #[error("plane dimension {k} is out of range for ambient dimension {n}")]
    PlaneDimension { k: usize, n: usize },
    #[error("q must be at least 2, got {0}")]
    FieldOrder(u64),
    #[error("point index {index} out of range for {size} points")]
    PointOutOfRange { index: u64, size: u64 },
    #[error("vector has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("zero vector does not define a direction")]
    ZeroNormal,
    #[error("assignment has {got} levels, expected one per direction ({expected})")]
    IncompleteAssignment { got: usize, expected: usize },
    #[error("point set is over (q={got_q}, n={got_n}), expected (q={q}, n={n})")]
    Mismatch { q: u32, n: usize, got_q: u32, got_n: usize },
    #[error("hyperplane #{direction} at level {level} meets the set in {hits} of {expected} points")]
    WitnessNotContained { direction: usize, level: Elem, hits: u64, expected: u64 },
    #[error("negative fiber size {0}")]
    NegativeFiber(i64),
    #[error("malformed point-set file: {0}")]
    Format(String),
    #[error("search space too large: {0}")]
    SearchSpace(String),
    #[error("node budget must be positive")]
    ZeroBudget,
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
