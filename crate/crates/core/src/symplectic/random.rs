//! Seeded generation of random symplectic transformations and test states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::{expm, Matrix, SymMatrix};
use crate::symplectic::{omega, CovarianceMatrix};
use crate::tol::DEFAULT_SYMPLECTIC_MAGNITUDE;

/// Random symplectic matrix `S = exp(Omega K)` for a random symmetric `K`
/// with Frobenius norm `magnitude`; `S Omega S^T = Omega` by construction.
pub fn random_symplectic(n_modes: usize, seed: u64, magnitude: f64) -> Matrix {
    let d = 2 * n_modes;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let raw = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let k = SymMatrix::from_matrix(&raw);
    let norm = k.matrix().fro_norm();
    let k = if norm > 0.0 {
        k.scale(magnitude / norm)
    } else {
        k
    };
    let generator = omega(n_modes).matrix() * k.matrix();
    expm(&generator).expect("exponential of a finite generator")
}

/// Random covariance matrix with the prescribed symplectic spectrum:
/// `sigma = S^T diag(nu_1, nu_1, ..., nu_N, nu_N) S` for a random symplectic `S`.
pub fn random_cm(n_modes: usize, seed: u64, symplectic_eigs: &[f64]) -> Result<CovarianceMatrix> {
    if symplectic_eigs.len() != n_modes {
        return Err(Error::InvalidArgument(format!(
            "need {n_modes} symplectic eigenvalues, got {}",
            symplectic_eigs.len()
        )));
    }
    if let Some(&nu) = symplectic_eigs.iter().find(|&&nu| nu < 1.0) {
        return Err(Error::Unphysical {
            reason: format!("requested symplectic eigenvalue {nu} below vacuum"),
        });
    }
    let s = random_symplectic(n_modes, seed, DEFAULT_SYMPLECTIC_MAGNITUDE);
    let mut diag = Vec::with_capacity(2 * n_modes);
    for &nu in symplectic_eigs {
        diag.push(nu);
        diag.push(nu);
    }
    let sigma = &(&s.t() * &Matrix::diag(&diag)) * &s;
    CovarianceMatrix::new(SymMatrix::from_matrix(&sigma))
}
