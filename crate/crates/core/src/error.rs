use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("quadratic form is not definite")]
    Indefinite,

    #[error("exact division failed: {0}")]
    InexactDivision(String),

    #[error("vector is not a (-2)-vector (square norm {0})")]
    NotRoot(i64),

    #[error("lattice has no positive cone anchor")]
    NoConeAnchor,

    #[error("vector is not in the positive cone")]
    NotPositive,

    #[error("constraint system describes an infinite set")]
    InfiniteSet,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-integral result: {0}")]
    NonIntegral(String),

    #[error("root configuration is not an ADE diagram: {0}")]
    NotAde(String),

    #[error("budget exhausted: {0}")]
    Exhausted(String),

    #[error("polynomial is not reciprocal")]
    NotReciprocal,

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("no real root greater than 1")]
    NoRootAboveOne,

    #[error("property check failed: {0}")]
    PropertyFailed(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
