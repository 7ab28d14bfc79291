//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot invert a quaternion of zero magnitude")]
    ZeroQuaternion,
    #[error("division is undefined for these dual quaternions")]
    DivisionUndefined,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("rotation indices out of range")]
    IndexOutOfRange,
    #[error("off-diagonal entry too small to build a rotation")]
    DegenerateOffdiag,
    #[error("diagonal entries too close for the near-diagonal eigenvector correction")]
    RepeatedDiagonal,
    #[error("standard-part spectrum has (near-)repeated eigenvalues")]
    DegenerateSpectrum,
    #[error("embedded eigenvalues failed to pair: {0}")]
    PairingFailure(String),
    #[error("invalid multiplicities: {0}")]
    InvalidMultiplicities(String),
    #[error("invalid sparsity: {0}")]
    InvalidSparsity(String),
    #[error("reference norm must be positive")]
    ZeroNorm,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
