use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{operation} is not supported for {kind} weights")]
    Unsupported { operation: &'static str, kind: &'static str },

    #[error("path enumeration exceeded the cap of {cap} paths")]
    EnumerationOverflow { cap: usize },

    #[error("{edges} relevant edges exceed the exhaustive limit of {max}")]
    TooManyEdges { edges: usize, max: usize },

    #[error("weight {0} has no exact representation in the requested scalar type")]
    InexactWeight(f64),

    #[error("no feasible crossing")]
    Infeasible,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidArgument(msg.into())
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
