use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a tropical point needs at least 2 coordinates, found {0}")]
    TooFewCoordinates(usize),
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("vector of length {len} does not index the leaf pairs of any tree with at least 3 leaves")]
    NotPairIndexed { len: usize },
    #[error("point is not an ultrametric: max not attained twice on leaves ({0}, {1}, {2})")]
    NotUltrametric(usize, usize, usize),
    #[error("leaf sets differ: {0} vs {1} leaves")]
    LeafSetMismatch(usize, usize),
    #[error("tree is not equidistant: root-to-leaf lengths range over [{min}, {max}]")]
    NotEquidistant { min: f64, max: f64 },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("empty input")]
    Empty,
    #[error("point lies outside the polytope")]
    OutsidePolytope,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("linear program is {0}")]
    Infeasible(&'static str),
    #[error("not a Fermat-Weber point: objective moved from {before} to {after} while pulling into the hull")]
    NotFermatWeber { before: f64, after: f64 },
    #[error("sample has {found} points but {needed} are required")]
    SampleTooSmall { needed: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;
