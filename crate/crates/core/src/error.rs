use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("points not in general position: labels {labels:?} are affinely dependent")]
    Degenerate { labels: Vec<u32> },

    #[error("duplicate label {0}")]
    DuplicateLabel(u32),

    #[error("labels {0} and {1} have identical coordinates")]
    DuplicatePoint(u32, u32),

    #[error("unknown label {0}")]
    UnknownLabel(u32),

    #[error("flattening factor must be positive, got {0}")]
    NonPositiveEpsilon(String),

    #[error("{what} supports at most {max} points, got {n}")]
    Capacity { what: &'static str, n: usize, max: usize },

    #[error("sequence is not a permutation of the point labels: {0}")]
    NotPermutation(String),

    #[error("blocks do not partition the labels: {0}")]
    NotPartition(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
