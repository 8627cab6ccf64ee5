//! Shared helpers for the integration suites: random stable quadratic
//! systems and verified stabilising solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use cvfeed::dynamics::{drift_from_hamiltonian, steady_state_cm, DriftMatrix, HamiltonianMatrix};
use cvfeed::feedback::{entanglement_bound, is_stabilising_solution};
use cvfeed::linalg::{solve_lyapunov, Matrix, SymMatrix};
use cvfeed::symplectic::symplectic_spectrum;
use cvfeed::CovarianceMatrix;

// Fields are consumed differently by each test binary.
#[allow(dead_code)]
pub struct StabilisingSample {
    pub n_modes: usize,
    pub drift: DriftMatrix,
    /// Two smallest eigenvalues of -A - A^T.
    pub alpha: (f64, f64),
    /// Verified stabilising solutions for this drift.
    pub sigmas: Vec<CovarianceMatrix>,
}

/// Draw a random stable drift `A = (Omega H - 1)/2` from a random symmetric
/// Hamiltonian matrix, rejecting unstable draws.
pub fn random_stable_drift(rng: &mut ChaCha12Rng, n_modes: usize) -> DriftMatrix {
    loop {
        let d = 2 * n_modes;
        let raw = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let scale = rng.random_range(0.05..0.9);
        let h = SymMatrix::from_matrix(&raw.scale(scale));
        let a = drift_from_hamiltonian(&HamiltonianMatrix::new(h).unwrap());
        if a.stability_margin() < -1e-3 {
            return a;
        }
    }
}

/// Sample `n_systems` stable quadratic systems with up to three verified
/// stabilising solutions each: the free steady state, a scaled copy pushed
/// toward the physicality boundary, and the steady state of a randomly
/// weakened diffusion.
pub fn sample_stabilising_systems(
    n_systems: usize,
    seed: u64,
    min_modes: usize,
    max_modes: usize,
) -> Vec<StabilisingSample> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_systems);
    while out.len() < n_systems {
        let n_modes = rng.random_range(min_modes..=max_modes);
        let a = random_stable_drift(&mut rng, n_modes);
        let bound = entanglement_bound(&a).unwrap();
        let free = match steady_state_cm(&a) {
            Ok(s) => s,
            Err(_) => continue,
        };

        let mut sigmas = vec![free.clone()];

        // c * sigma_f keeps the Riccati inequality for c <= 1 and stays
        // physical down to c = 1 / nu_min.
        let nu_min = symplectic_spectrum(&free).unwrap()[0];
        let c = rng.random_range((1.0 / nu_min).min(1.0)..=1.0);
        let scaled = CovarianceMatrix::new(free.sigma().scale(c)).unwrap();
        sigmas.push(scaled);

        // Steady state of A s + s A^T + Q = 0 with 0 <= Q <= 1 obeys
        // A s + s A^T + 1 = 1 - Q >= 0; physicality is filtered below.
        let d = 2 * n_modes;
        let q = SymMatrix::diag(
            &(0..d)
                .map(|_| 1.0 - rng.random_range(0.0..0.7))
                .collect::<Vec<_>>(),
        );
        if let Ok(s) = solve_lyapunov(a.matrix(), &q) {
            if let Ok(cm) = CovarianceMatrix::new(s) {
                sigmas.push(cm);
            }
        }

        let sigmas: Vec<CovarianceMatrix> = sigmas
            .into_iter()
            .filter(|s| {
                is_stabilising_solution(s, a.matrix(), 1e-10)
                    .map(|r| r.stabilising)
                    .unwrap_or(false)
            })
            .collect();
        if sigmas.is_empty() {
            continue;
        }
        out.push(StabilisingSample {
            n_modes,
            drift: a,
            alpha: (bound.alpha1, bound.alpha2),
            sigmas,
        });
    }
    out
}
