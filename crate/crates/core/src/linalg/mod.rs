//! Self-contained dense real linear algebra.
//!
//! Everything downstream (phase-space kinematics, dynamics, feedback) builds
//! on these kernels; no external numerical backend is used. Matrices here are
//! desk-scale (dimension <= 64), so simplicity and auditability win over
//! asymptotic performance everywhere.

mod eigen;
mod functions;
mod matrix;
mod solve;

pub use eigen::{is_psd, min_eig_sym, sym_eig, sym_eig_tol, SymEig};
pub use functions::{expm, sqrtm_psd, sqrtm_psd_tol};
pub use matrix::{Matrix, SymMatrix};
pub use solve::{inverse, lyapunov_residual, solve, solve_lyapunov, solve_lyapunov_tol};
