use thiserror::Error;

/// Errors produced by the model learners and the data pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix is not stable (min real eigenvalue part {min_real_part:e})")]
    Unstable { min_real_part: f64 },

    #[error("eigenvalue iteration did not converge; stability is indeterminate")]
    Indeterminate,

    #[error("matrix is not strictly diagonally dominant (margin {margin:e})")]
    NotDiagonallyDominant { margin: f64 },

    #[error("simulation diverged at step {step}; reduce dt")]
    Diverged { step: usize },

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("Lyapunov residual {residual:e} exceeds {tolerance:e}; input is not a steady-state pair")]
    LyapunovResidual { residual: f64, tolerance: f64 },

    #[error("not a projection: {0}")]
    NotProjection(String),

    #[error("not a Laplacian: max |row sum| = {max_row_sum:e}")]
    NotLaplacian { max_row_sum: f64 },

    #[error("reduced covariance is singular; the underlying graph is not connected")]
    Disconnected,

    #[error("missing estimate component: {0}")]
    Missing(&'static str),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite
                | Error::Singular(_)
                | Error::NotPositiveDefinite(_)
                | Error::Unstable { .. }
                | Error::Indeterminate
                | Error::NotDiagonallyDominant { .. }
                | Error::Diverged { .. }
                | Error::LinearProgram(_)
                | Error::LyapunovResidual { .. }
                | Error::NotLaplacian { .. }
                | Error::Disconnected
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
