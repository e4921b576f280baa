//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building or querying the structures in
/// this crate. Variants carry enough context to print an actionable message;
/// witnesses are formatted simplices or vertex ids.
#[derive(Debug, Error)]
pub enum Error {
    #[error("simplex {0} has repeated or unsorted vertices")]
    MalformedSimplex(String),

    #[error("empty complex: at least one maximal simplex is required")]
    EmptyComplex,

    #[error("simplex {0} is not part of the complex")]
    SimplexNotFound(String),

    #[error("vertex {0} has no assigned image")]
    UnmappedVertex(u32),

    #[error("image of {simplex} is {image}, which is not a simplex of the codomain")]
    NonSimplicialImage { simplex: String, image: String },

    #[error("map composition mismatch: inner codomain differs from outer domain")]
    ComposeMismatch,

    #[error("maps must share a domain: {0}")]
    DomainMismatch(String),

    #[error("points have no common carrier simplex ({0} and {1})")]
    NoCommonCarrier(String, String),

    #[error("{face} is not a face of {simplex}")]
    NotAFace { face: String, simplex: String },

    #[error("invalid barycentric coordinates: {0}")]
    BadCoordinates(String),

    #[error("comesh is undefined for a complex with no positive-dimensional simplex")]
    ComeshUndefined,

    #[error("epsilon {eps} is out of range; this operation requires 0 < epsilon < {max}")]
    EpsilonOutOfRange { eps: f64, max: f64 },

    #[error("requested depth {requested} is below the minimal depth {required}")]
    DepthTooShallow { requested: usize, required: usize },

    #[error("subdivision would produce about {projected} simplices, over the budget of {budget}")]
    BudgetExceeded { projected: u64, budget: u64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("tower level {level} out of range (depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("controlled-equivalence precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("homotopy segment endpoints at {0} do not share a carrier simplex")]
    CarrierViolation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("document is invalid: {0}")]
    InvalidDocument(String),

    #[error("rendering is only supported for complexes of dimension <= 2 (got {0})")]
    UnsupportedRender(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
