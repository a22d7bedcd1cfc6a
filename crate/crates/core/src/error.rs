use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semidefinite (jitter ladder exhausted at {0:e})")]
    NotPsd(f64),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("integration diverged: {0}")]
    IntegrationDiverged(String),

    #[error("value outside parameter domain: {0}")]
    Domain(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("ABC threshold infeasible: acceptance rate {rate:e} below {min_rate:e}")]
    InfeasibleThreshold { rate: f64, min_rate: f64 },

    #[error("ABC population degenerate at level {level}: ESS {ess:.3}")]
    Degenerate { level: usize, ess: f64 },

    #[error("sampler diverged: {0}")]
    Diverged(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
