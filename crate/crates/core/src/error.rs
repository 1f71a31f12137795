use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid ladder: coarsest level {j0} exceeds finest level {jmax}")]
    InvalidLadder { j0: i32, jmax: i32 },

    #[error("unsupported derivative order {0} (only 0, 1 and 2 are available)")]
    UnsupportedOrder(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate geometry: {0}")]
    GeometryDegenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("Picard iteration diverged at time step {step}, iteration {iteration}")]
    Divergence { step: usize, iteration: usize },

    #[error("reference vector has zero norm")]
    DegenerateReference,

    #[error("least-squares solver failed: {0}")]
    Solver(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
