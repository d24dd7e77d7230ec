use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "rejection budget exhausted after {rejections} rejected draws; \
         minpoi = {minpoi} is likely too large for this dataset"
    )]
    RejectionBudgetExhausted { rejections: u64, minpoi: usize },

    #[error("minpoi = {minpoi} exceeds the {available} samples available to each submodel")]
    MinpoiTooLarge { minpoi: usize, available: usize },

    #[error(
        "term count {terms} exceeds the ceiling of {ceiling} at step {step}; \
         use a stronger abstraction (e.g. a larger delta-v)"
    )]
    TermCeilingExceeded { terms: usize, ceiling: usize, step: usize },

    #[error("bounding box is degenerate along dimension {0}")]
    DegenerateBox(usize),

    #[error("polytope is unbounded or empty inside the bounding box")]
    UnboundedPolytope,

    #[error("leaf has {0} free coordinates, expected a one-dimensional tree")]
    NotOneDimensional(usize),

    #[error("coordinate {index} does not exist in a {dim}-dimensional space")]
    InvalidCoordinate { index: usize, dim: usize },

    #[error("tree is not in the and-of-or form produced by simplification")]
    UnexpectedTreeShape,

    #[error("no valid start point for generation")]
    NoStartPoint,

    #[error("start point is not a member of the shape")]
    StartPointNotMember,

    #[error("labels must be unique and non-empty: {0}")]
    InvalidLabels(String),

    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T, E = PolyraError> = std::result::Result<T, E>;
