use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary: max |U^dagger U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("photon-number mismatch: expected {expected} photons, found {found}")]
    PhotonCountMismatch { expected: usize, found: usize },

    #[error("{what} of size {size} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("invalid distinguishability model: {0}")]
    InvalidGram(String),

    #[error("invalid mode configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 1 for numerical or I/O failures, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalConsistency(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
