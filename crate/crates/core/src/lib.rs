//! Steady-state Gaussian entanglement under continuous-measurement feedback.
//!
//! This crate models N bosonic modes subject to a quadratic Hamiltonian and
//! pure losses, continuously monitored through general-dyne detection of the
//! environment and steered by linear driving. It provides:
//!
//! - dense linear-algebra kernels (Jacobi eigensolver, PSD square root,
//!   Lyapunov solver, matrix exponential) with no external numerical backend;
//! - phase-space kinematics: symplectic spectra, partial transposition,
//!   logarithmic negativity, physicality tests, random test states;
//! - moment dynamics: drift construction, stability, steady states,
//!   fixed-step integration, and direct-feedback modifications;
//! - the feedback layer: unravelling matrices, measurement matrices, the
//!   stabilising-solution test, the steady-state entanglement bound, and the
//!   optimal-unravelling reconstruction;
//! - the parametric application: reduced two-mode models of all-to-all
//!   parametric interactions, closed-form free/optimal entanglement, and
//!   numerically optimized local Markovian feedback.
//!
//! Conventions: mode ordering `(q1, p1, ..., qN, pN)`, vacuum covariance
//! matrix equal to the identity, time in units of the loss rate, and
//! entanglement measured in ebits (log base 2).

pub mod dynamics;
pub mod error;
pub mod feedback;
pub mod io;
pub mod linalg;
pub mod opt;
pub mod parametric;
pub mod symplectic;
pub mod tol;

pub use dynamics::{DriftMatrix, DriveMatrix, HamiltonianMatrix};
pub use error::{Error, Result};
pub use feedback::{BoundReport, UnravellingMatrix, UpsilonMatrix};
pub use linalg::{Matrix, SymMatrix};
pub use symplectic::{Bipartition, CovarianceMatrix, MeanVector};
