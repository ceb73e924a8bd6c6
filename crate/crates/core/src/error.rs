use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below {tolerance:e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("trace is {trace}, expected 1 within {tolerance:e}")]
    Trace { trace: f64, tolerance: f64 },

    #[error("state is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{measure} is defined here for pure states only; purity {purity} is below {gate}")]
    NotPure { measure: &'static str, purity: f64, gate: f64 },

    #[error("subspace has no support: weight {weight:e} below {threshold:e}")]
    NoSupport { weight: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("measurement settings are rank deficient: rank {rank} of {required} required")]
    RankDeficient { rank: usize, required: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
