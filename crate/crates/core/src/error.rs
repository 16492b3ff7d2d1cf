use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("unsupported dimension {dim}; supported dimensions are {supported}")]
    UnsupportedDimension { dim: usize, supported: String },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix is singular (minimum eigenvalue {min_eigenvalue:.3e})")]
    Singular { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("outcome has length {found}, expected {expected}")]
    OutcomeLength { expected: usize, found: usize },

    #[error("parameter `{name}` = {value} outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("exact enumeration over 2^{count} outcomes exceeds the limit 2^{limit}")]
    TooManyOutcomes { count: usize, limit: usize },

    #[error("outcome probability {probability:.3e} is too small to condition on")]
    NegligibleOutcome { probability: f64 },

    #[error("at least 2 samples are required, got {n}")]
    TooFewSamples { n: u64 },

    #[error("POVM element {index} has vanishing trace")]
    ZeroTraceElement { index: usize },

    #[error("chi-squared factor 1 + H = {value:.3e} is not positive; the ensemble is outside the valid regime")]
    InvalidRegime { value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
