use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative channel strength exponent {value} at ({rx}, {tx})")]
    NegativeExponent { rx: usize, tx: usize, value: f64 },

    #[error("direct link of user {user} has non-positive exponent {value}")]
    NonPositiveDirectLink { user: usize, value: f64 },

    #[error("invalid quantization thresholds: {0}")]
    InvalidThresholds(String),

    #[error("parameter out of range: {0}")]
    InvalidRange(String),

    #[error("too few users: {0}")]
    TooFewUsers(String),

    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),

    #[error("invalid exponent set: {0}")]
    InvalidExponentSet(String),

    #[error("invalid transmit configuration: {0}")]
    InvalidTxConfig(String),

    #[error("invalid receive configuration: {0}")]
    InvalidRxConfig(String),

    #[error("channel has no phase matrix; finite-SNR evaluation needs phases")]
    MissingPhases,

    #[error("nominal power must exceed 1, got {0}")]
    PowerTooLow(f64),

    #[error("invalid stream count: {0}")]
    InvalidStreamCount(String),

    #[error("seed list is empty")]
    EmptySeedList,

    #[error("negative GDoF target {value} for user {user}")]
    NegativeTarget { user: usize, value: f64 },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("incompatible decomposition: {0}")]
    IncompatibleDecomposition(String),

    #[error("unsupported TIM topology: {0}")]
    UnsupportedTopology(String),

    #[error("top quantization threshold {0} exceeds 1/2")]
    ThresholdAboveHalf(f64),

    #[error("ring of {users} users is not a multiple of the alignment period {period}")]
    RingNotAligned { users: usize, period: usize },

    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
