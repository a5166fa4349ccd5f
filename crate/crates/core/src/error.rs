use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("not a frame: numerical rank {rank} < ambient dimension {dim}")]
    NotAFrame { rank: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("rank deficient: numerical rank {rank} of {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("operator is not bijective: condition number {condition:.3e}")]
    NotBijective { condition: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("iteration diverged: {0}")]
    Diverged(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension_mismatch",
            Error::NotAFrame { .. } => "not_a_frame",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InsufficientData(_) => "insufficient_data",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::NotBijective { .. } => "not_bijective",
            Error::Contract(_) => "contract_violation",
            Error::Precondition(_) => "precondition_failed",
            Error::Diverged(_) => "diverged",
            Error::Io(_) => "io_error",
            Error::Format(_) => "format_error",
        }
    }

    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::Dimension { expected, got }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
