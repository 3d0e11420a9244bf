use alloc::string::String;

/// Errors shared by the model, estimator and expansion layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("total exponent {order} exceeds the supported maximum of 8")]
    OrderTooHigh { order: u32 },

    #[error("GaussianStationary supports mean 0 only (got {0})")]
    NonZeroGaussianMean(f64),

    #[error("autocovariance violates |gamma({lag})| <= gamma(0): {value} vs {gamma0}")]
    InvalidAutocovariance { lag: usize, value: f64, gamma0: f64 },

    #[error("finite support of {atoms} atoms exceeds the cap of {cap}")]
    SupportExplosion { atoms: u64, cap: u64 },

    #[error("insufficient sample size: need n >= {needed}, got {got}")]
    InsufficientSampleSize { needed: usize, got: usize },

    #[error("estimator enumeration refused for n = {n}, arity = {arity} (over the work cap)")]
    EnumerationTooLarge { n: usize, arity: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("transition matrix row {row} sums to {sum}, not 1")]
    InvalidTransitionRow { row: usize, sum: f64 },

    #[error("covariance matrix is not square ({rows} rows, {cols} columns)")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("invalid expansion spec: {0}")]
    InvalidExpansionSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
