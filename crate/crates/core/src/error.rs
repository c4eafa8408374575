use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("capacity exceeded: {what} needs {needed} entries, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "DimensionError",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::Capacity { .. } => "CapacityError",
            Error::Argument(_) => "ArgumentError",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "JsonError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
