use thiserror::Error;

/// Errors surfaced by dataset generation, file formats, and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H†| = {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("eigendecomposition did not converge")]
    EigenConvergence,

    #[error(
        "state synthesis missed CE target {target} after {iterations} iterations \
         (best |CE - target| = {best_gap:.3e})"
    )]
    Synthesis { target: f64, iterations: usize, best_gap: f64 },

    #[error("dataset format error at byte {offset}: {detail}")]
    Format { offset: u64, detail: String },

    #[error("dataset invariant violated: {0}")]
    DatasetInvariant(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("quadratic program did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    QpConvergence { sweeps: usize, residual: f64 },

    #[error("non-finite value in loss or gradient at parameter index {param_index}")]
    NonFinite { param_index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
