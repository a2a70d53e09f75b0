use thiserror::Error;

#[derive(Debug, Error)]
pub enum FalcError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("SVD failed to converge after {sweeps} sweeps (off-diagonal ratio {residual:e})")]
    SvdNoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("conjugate gradient did not converge for block {block}: relative residual {residual:e}")]
    LeastNormFailed { block: String, residual: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FalcError>;
