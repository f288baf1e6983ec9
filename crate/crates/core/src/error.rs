use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid clone parameters: need 1 <= N <= M, got N={n}, M={m}")]
    InvalidParams { n: u64, m: u64 },

    #[error("M={m} is not an integral multiple of N={n}")]
    NotMultiple { n: u64, m: u64 },

    #[error("{what} = {value} out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("exact backend refused for M={m} (limit {limit})")]
    ExactTooLarge { m: u64, limit: u64 },

    #[error("{qubits} qubits exceeds the dense oracle limit of {limit}")]
    TooManyQubits { qubits: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("observable is not Hermitian (deviation {0})")]
    NotHermitian(f64),

    #[error("supplied orthogonal direction overlaps the member state (|<psi|perp>| = {0})")]
    NotOrthogonal(f64),

    #[error("invalid corruption: {0}")]
    InvalidCorruption(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
