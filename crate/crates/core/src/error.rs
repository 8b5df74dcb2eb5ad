use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid register size {n}: need 1 <= n <= {max}")]
    InvalidRegister { n: usize, max: usize },

    #[error("site {site} out of range for a {n}-qubit register (sites are 1-based)")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |A - A†| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("unitarity check failed: max |U†U - I| = {deviation:e} exceeds {tolerance:e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("eigensolver did not converge on a {size}x{size} matrix with max entry {norm:e}")]
    EigenNonConvergence { size: usize, norm: f64 },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    UndefinedFunction { eigenvalue: f64 },

    #[error("schedule Hamiltonians do not commute (max |[H(a),H(b)]| = {deviation:e}); use Trotter evolution")]
    NonCommutingSchedule { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed matrix file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
