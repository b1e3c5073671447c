use thiserror::Error;

/// Errors produced by the compressor toolkit.
#[derive(Debug, Error)]
pub enum SqcError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix entries must be finite (found NaN or Inf at index {index})")]
    NonFinite { index: usize },

    #[error("state length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("state norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian: symmetry defect norm {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("SVD failed to converge within {iterations} iterations")]
    SvdConvergence { iterations: usize },

    #[error("Kronecker product dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid qubit permutation: {reason}")]
    InvalidPermutation { reason: String },

    #[error("invalid bipartition: {reason}")]
    InvalidBipartition { reason: String },

    #[error("qubit subset to keep is empty or out of range")]
    InvalidKeepSet,

    #[error("input columns are not orthonormal (defect {defect:e}) or rank deficient")]
    RankDeficient { defect: f64 },

    #[error("truncation rank {r} outside 1..={k}")]
    TruncationRank { r: usize, k: usize },

    #[error("trash block size {n_b} outside 1..={max}")]
    TrashSize { n_b: usize, max: usize },

    #[error("Schmidt measure {m} outside 0..={n_b} or n_b {n_b} > n_a {n_a}")]
    CostDomain { n_a: usize, n_b: usize, m: usize },

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("class {label} has {available} samples, need {needed} for the configured split")]
    InsufficientSamples { label: u8, available: usize, needed: usize },

    #[error("typical state would be the zero vector")]
    ZeroTypicalState,

    #[error("parameter vector length {got} does not match ansatz parameter count {expected}")]
    ParameterCount { expected: usize, got: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SqcError>;
