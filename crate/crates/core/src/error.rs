use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries or has inconsistent storage: {0}")]
    InvalidMatrix(String),

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("exponents must satisfy p >= q >= 1, got p = {p}, q = {q}")]
    InvalidExponentOrder { p: f64, q: f64 },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("matrix is rank deficient (smallest singular value {smallest:e}, threshold {threshold:e})")]
    RankDeficient { smallest: f64, threshold: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("subspace dimension {k} exceeds floor(n/2) = {max} for n = {n}")]
    DimensionTooLarge { k: usize, n: usize, max: usize },

    #[error("not a permutation of 0..{n}: {detail}")]
    InvalidPermutation { n: usize, detail: String },

    #[error("instance too large for exhaustive search: n = {n}, limit = {limit}")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("smoothing epsilon must be positive when p < 2 (p = {p})")]
    NonSmoothConfiguration { p: f64 },

    #[error("configuration is infeasible: {0}")]
    InfeasibleConfiguration(String),

    #[error("numerical failure in restart {restart}: {detail}")]
    NumericalFailure { restart: usize, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("graph is not regular: {0}")]
    NotRegular(String),

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("metric is degenerate: {0}")]
    DegenerateMetric(String),

    #[error("embedding is constant; the pair average vanishes")]
    DegenerateEmbedding,
}

pub type Result<T> = std::result::Result<T, Error>;
