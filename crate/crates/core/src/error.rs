use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid matrix shape: {0}")]
    Shape(String),

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix is not in the open cone (smallest eigenvalue {min_eig:.6e})")]
    NotInCone { min_eig: f64 },

    #[error("neither the matrix nor its negative lies in the cone")]
    NotSigned,

    #[error("Jacobi eigen-solver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("non-positive Cholesky pivot {value:.6e} at row {row}")]
    NonPositivePivot { row: usize, value: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("{what} left the cone at index {index} (smallest eigenvalue {min_eig:.6e})")]
    LeftCone {
        what: &'static str,
        index: usize,
        min_eig: f64,
    },

    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ConeError>;
