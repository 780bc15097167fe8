use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dense limit exceeded: {what} is {actual}, limit {limit}")]
    DenseLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("ground-space degeneracy is ambiguous: level separation {separation:e} <= tolerance {tol:e}")]
    DegeneracyAmbiguous { separation: f64, tol: f64 },

    #[error("parity operator {0} does not commute with the Hamiltonian")]
    NonCommuting(String),

    #[error("parity operator {0} is not diagonal in the computational basis")]
    NotDiagonal(String),

    #[error("bad site set: {0}")]
    BadSites(String),

    #[error("subset size {m} exceeds site count {n}")]
    SubsetTooLarge { m: usize, n: usize },

    #[error("particle number {0} is too small for a 2-RDM")]
    ParticleNumber(usize),

    #[error("state does not have a fixed particle number")]
    MixedParticleNumber,

    #[error("marginal vector incomplete: {0}")]
    IncompleteMarginals(String),

    #[error("schema mismatch at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
