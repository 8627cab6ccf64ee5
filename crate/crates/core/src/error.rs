//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The Jacobi eigensolver exhausted its sweep budget.
    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})"
    )]
    NonConvergence { sweeps: usize, residual: f64 },

    /// A matrix required to be positive semidefinite has a genuinely negative eigenvalue.
    #[error(
        "matrix is not positive semidefinite: minimum eigenvalue {min_eig:.3e} below -{tol:.1e}"
    )]
    NotPsd { min_eig: f64, tol: f64 },

    /// A matrix required to be positive definite is not.
    #[error("matrix is not positive definite: minimum eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    /// A dense linear system had a vanishing pivot.
    #[error("singular linear system (pivot {pivot:.3e})")]
    Singular { pivot: f64 },

    /// The Lyapunov equation has no unique solution (the drift has mirrored
    /// eigenvalues) or the solve residual exceeded tolerance.
    #[error("singular Lyapunov system: residual {residual:.3e} exceeds {tol:.3e}")]
    SingularLyapunov { residual: f64, tol: f64 },

    /// A covariance matrix violates the uncertainty relation.
    #[error("unphysical covariance matrix: {reason}")]
    Unphysical { reason: String },

    /// A candidate unravelling matrix is not symmetric positive semidefinite.
    #[error("invalid unravelling matrix: {reason} (minimum eigenvalue {min_eig:.3e})")]
    InvalidUnravelling { reason: String, min_eig: f64 },

    /// The drift matrix fails the stability test (A + A^T) < 0.
    #[error("unstable drift: max eigenvalue of A + A^T is {margin:.6e}")]
    Unstable { margin: f64 },

    /// A parametric model sits at or beyond its stability threshold.
    #[error(
        "unstable parametric model: chi = {chi} at or above the stability \
         threshold 1/(2(N-1)) = {threshold} for N = {n_modes}"
    )]
    UnstableModel {
        n_modes: usize,
        chi: f64,
        threshold: f64,
    },

    /// The closed feedback loop is unstable at the requested gain.
    #[error("unstable closed loop at mu1 = {mu1:.6e} (stability margin {margin:.6e})")]
    UnstableLoop { mu1: f64, margin: f64 },

    /// The bound-attaining covariance construction failed its postconditions.
    #[error("optimal covariance construction failed: {reason}")]
    ConstructionFailed { reason: String },

    /// A bipartition does not partition the mode set.
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    /// Conformability failure between operands.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// A scalar or structural argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix contains NaN or infinite entries.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
