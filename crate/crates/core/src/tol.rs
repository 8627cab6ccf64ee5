//! Centralized numerical tolerances.
//!
//! Every default threshold used by the crate lives here; operations that
//! accept an explicit tolerance treat these as their defaults. Positivity
//! tests near saturation need explicit slack, so the boundary tolerance is
//! deliberately looser than the kernel ones.

/// Eigensolver accuracy: off-diagonal norm relative to the matrix scale at
/// which the Jacobi iteration stops, and the orthogonality guarantee of the
/// returned eigenvector matrix.
pub const TOL_EIG: f64 = 1e-10;

/// Slack accepted below zero in positive-semidefinite tests.
pub const TOL_PSD: f64 = 1e-10;

/// Relative residual accepted from linear-equation and Lyapunov solves.
pub const TOL_RESID: f64 = 1e-9;

/// Slack for inequalities that are exactly saturated by optimal states.
pub const TOL_BOUNDARY: f64 = 1e-8;

/// Frobenius norm of the random symmetric generator used when drawing
/// random symplectic transformations.
pub const DEFAULT_SYMPLECTIC_MAGNITUDE: f64 = 2.0;
