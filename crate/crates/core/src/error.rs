use thiserror::Error;

/// Errors raised by the signal model and the reduction techniques.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subcarrier count {0} must be a power of two and at least 2")]
    InvalidSubcarrierCount(usize),
    #[error("oversampling factor must be at least 1, got {0}")]
    InvalidOversampling(usize),
    #[error("signal length {len} is not a multiple of oversampling factor {oversampling}")]
    LengthMismatch { len: usize, oversampling: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("bit count {0} is odd; QPSK needs two bits per symbol")]
    OddBitCount(usize),
    #[error("PAPR is undefined for an all-zero signal")]
    ZeroSignal,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("threshold grid must be strictly increasing")]
    NonIncreasingGrid,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("search space of {size} candidates exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
    #[error("nonzero data on reserved or pilot subcarrier {0}")]
    OccupiedReservedTone(usize),
    #[error("instance too large for the exact solver: N = {n}, limit {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("linear program failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
