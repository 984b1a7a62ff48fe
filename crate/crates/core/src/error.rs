use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unstable type (g, n) = ({g}, {n}): need 2g - 2 + n > 0")]
    Unstable { g: u32, n: u32 },

    #[error("invalid stable graph: {0}")]
    InvalidGraph(String),

    #[error("degree {degree} out of range for (g, n) = ({g}, {n}); dimension is {dim}")]
    DegreeOutOfRange { g: u32, n: u32, degree: u32, dim: u32 },

    #[error("classes live on different spaces or degrees: {0}")]
    Mismatch(String),

    #[error("invalid ramification data: {0}")]
    Ramification(String),

    #[error("modulus r = {r} does not exceed the residue bound {bound}")]
    ModulusTooSmall { r: i64, bound: i64 },

    #[error("polynomiality threshold not reached: {0}")]
    Threshold(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
