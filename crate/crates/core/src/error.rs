use thiserror::Error;

/// Errors raised by the numerical pipelines.
///
/// Values are carried as `f64` regardless of the scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty probability vector")]
    EmptyInput,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("wrong length: expected {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("probabilities sum to {sum}, outside tolerance of 1")]
    SumOutOfTolerance { sum: f64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("operation requires a {expected} state")]
    WrongGroup { expected: &'static str },
    #[error("states belong to different groups")]
    GroupMismatch,
    #[error("deviation {value} at index {index} is below -1")]
    DeltaOutOfRange { index: usize, value: f64 },
    #[error("deviations sum to {sum}, expected 0")]
    DeviationSum { sum: f64 },
    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("sigma vanishes at index {index} where c is positive")]
    SupportMismatch { index: usize },
    #[error("{what}: requested {requested} exceeds cap {cap}")]
    ResourceLimit { what: &'static str, requested: u128, cap: u128 },
    #[error("number spectrum has a gap at index {index}")]
    GappedSpectrum { index: usize },
    #[error("state has zero number variance")]
    ZeroVariance,
    #[error("quadrature grid {grid} too coarse, need at least {required} points")]
    GridTooCoarse { grid: usize, required: usize },
    #[error("quadrature grid {0} is not a power of two")]
    GridNotPowerOfTwo(usize),
    #[error("spectral profile is degenerate (r_max = 0)")]
    DegenerateProfile,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
