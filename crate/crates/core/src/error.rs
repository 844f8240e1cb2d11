use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid gasket spec: {0}")]
    InvalidSpec(String),

    #[error("root solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("image of the circle passes through infinity")]
    LineImage,

    #[error("enumeration exceeded the capacity limit of {limit} circles")]
    CapacityExceeded { limit: usize },

    #[error("region contains no centers")]
    EmptyRegion,

    #[error("need at least two centers, found {0}")]
    Singleton(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("separation violated: {count} centers inside an epsilon window")]
    SeparationViolated { count: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
