use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("no sign change of the implicit function on ray bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("root finder did not reach |g| <= {tol:e} in {iterations} iterations (last |g| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        tol: f64,
        residual: f64,
    },

    #[error("boundary edge ({a:?}, {b:?}) is ambiguous: chord midpoint lies on the curve")]
    AmbiguousEdge { a: [f64; 2], b: [f64; 2] },

    #[error("mesh assumption violated at triangle {triangle}: {reason}")]
    MeshAssumptionViolated { triangle: usize, reason: String },

    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),

    #[error("local system of element {element} is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularLocalSystem { element: usize, condition: f64 },

    #[error("distinct nodes {first} and {second} coincide at ({x}, {y})")]
    DuplicateNodeCollision {
        first: usize,
        second: usize,
        x: f64,
        y: f64,
    },

    #[error("element {element} maps to {found} global nodes, expected {expected}")]
    InconsistentDof {
        element: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("sparse factorization broke down: matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("solve residual {residual:e} exceeds the contract {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("no exact solution available")]
    MissingExact,

    #[error("sequence is not a dyadic refinement: {0}")]
    NonDyadicSequence(String),

    #[error("{n} unknowns exceeds the dense limit {limit}")]
    TooLargeForDense { n: usize, limit: usize },

    #[error("sweep entry {param}: {source}")]
    Sweep { param: usize, source: Box<Error> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Configuration and input problems, as opposed to numerical failures.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Sweep { source, .. } => source.is_config_error(),
            Error::InvalidParam(_)
            | Error::UnsupportedDegree(_)
            | Error::NonDyadicSequence(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_) => true,
            _ => false,
        }
    }
}
