//! All-to-all parametric interactions: the reduced two-mode model, free and
//! optimal steady-state entanglement, and local Markovian feedback.
//!
//! `chi` is the dimensionless ratio of the pairwise interaction strength to
//! the loss rate; the open system is stable for `chi < 1 / (2 (N - 1))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    drift_from_hamiltonian, modified_dynamics, steady_state_cm, DriftMatrix, HamiltonianMatrix,
};
use crate::error::{Error, Result};
use crate::feedback::{
    entanglement_bound, is_stabilising_solution, measurement_matrix, UnravellingMatrix,
    UpsilonMatrix,
};
use crate::linalg::{sym_eig, Matrix, SymMatrix};
use crate::opt::{bisect_boundary, golden_section_min};
use crate::symplectic::{pt_min_symplectic, Bipartition, CovarianceMatrix};
use crate::tol::TOL_BOUNDARY;

/// Open-loop stability threshold `1 / (2 (N - 1))`.
pub fn stability_threshold(n_modes: usize) -> f64 {
    1.0 / (2.0 * (n_modes as f64 - 1.0))
}

/// An N-mode parametric model with a designated size split.
#[derive(Clone, Debug)]
pub struct ParametricModel {
    pub n_modes: usize,
    pub chi: f64,
    pub bipartition: Bipartition,
}

impl ParametricModel {
    pub fn new(n_modes: usize, chi: f64, bipartition: Bipartition) -> Result<Self> {
        if bipartition.n_modes() != n_modes {
            return Err(Error::InvalidBipartition(format!(
                "bipartition covers {} modes, model has {}",
                bipartition.n_modes(),
                n_modes
            )));
        }
        validate_chi(n_modes, chi)?;
        Ok(Self {
            n_modes,
            chi,
            bipartition,
        })
    }

    pub fn is_stable(&self) -> bool {
        self.chi < stability_threshold(self.n_modes)
    }
}

fn validate_chi(n_modes: usize, chi: f64) -> Result<()> {
    if n_modes < 2 {
        return Err(Error::InvalidArgument(format!(
            "parametric model needs at least two modes, got {n_modes}"
        )));
    }
    if !chi.is_finite() || chi < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chi must be finite and non-negative, got {chi}"
        )));
    }
    Ok(())
}

fn require_stable(n_modes: usize, chi: f64) -> Result<()> {
    validate_chi(n_modes, chi)?;
    let threshold = stability_threshold(n_modes);
    if chi >= threshold {
        return Err(Error::UnstableModel {
            n_modes,
            chi,
            threshold,
        });
    }
    Ok(())
}

/// Hamiltonian matrix of equal pairwise parametric couplings.
///
/// The entries are `2 chi` at every (q_j, p_k), j != k position: the drift
/// convention `A = (Omega H - 1) / 2` halves `Omega H`, and `chi` is defined
/// as the coupling that appears in the drift.
pub fn parametric_hamiltonian(n_modes: usize, chi: f64) -> Result<HamiltonianMatrix> {
    validate_chi(n_modes, chi)?;
    let mut h = SymMatrix::zeros(2 * n_modes);
    for j in 0..n_modes {
        for k in 0..n_modes {
            if j != k {
                h.set_sym(2 * j, 2 * k + 1, 2.0 * chi);
            }
        }
    }
    HamiltonianMatrix::new(h)
}

/// Drift of the full N-mode parametric system.
pub fn full_drift(n_modes: usize, chi: f64) -> Result<DriftMatrix> {
    Ok(drift_from_hamiltonian(&parametric_hamiltonian(
        n_modes, chi,
    )?))
}

/// Equivalent two-mode drift for an m:n size split of N = m + n modes.
///
/// Diagonal couplings `(m-1) chi` and `(n-1) chi`, off-diagonal
/// `sqrt(m n) chi`, with opposite signs in the p sector, minus 1/2. For
/// m = n this is the exact symmetric-mode reduction; the sqrt(m n)
/// off-diagonal extends it to unbalanced splits and is gated by the
/// full-system oracle in the test suite.
pub fn reduced_drift(m: usize, n: usize, chi: f64) -> Result<DriftMatrix> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "party sizes must be positive, got {m}:{n}"
        )));
    }
    validate_chi(m + n, chi)?;
    let (mf, nf) = (m as f64, n as f64);
    let cross = (mf * nf).sqrt() * chi;
    let mut k = Matrix::zeros(4, 4);
    k.set(0, 0, (mf - 1.0) * chi);
    k.set(1, 1, -(mf - 1.0) * chi);
    k.set(2, 2, (nf - 1.0) * chi);
    k.set(3, 3, -(nf - 1.0) * chi);
    k.set(0, 2, cross);
    k.set(2, 0, cross);
    k.set(1, 3, -cross);
    k.set(3, 1, -cross);
    DriftMatrix::from_matrix(&k - &Matrix::identity(4).scale(0.5))
}

/// Closed-form free steady-state logarithmic negativity (balanced split),
/// `log2[(1 + 2 chi)(1 + 2 (N-1) chi)] / 2` ebits.
pub fn free_logneg(n_modes: usize, chi: f64) -> Result<f64> {
    require_stable(n_modes, chi)?;
    let nf = n_modes as f64;
    Ok(0.5 * ((1.0 + 2.0 * chi) * (1.0 + 2.0 * (nf - 1.0) * chi)).log2())
}

/// Closed-form entanglement bound,
/// `-[log2(1 - 2 chi) + log2(1 - 2 (N-1) chi)] / 2` ebits.
pub fn parametric_bound(n_modes: usize, chi: f64) -> Result<f64> {
    require_stable(n_modes, chi)?;
    let nf = n_modes as f64;
    let value = -0.5 * ((1.0 - 2.0 * chi).log2() + (1.0 - 2.0 * (nf - 1.0) * chi).log2());
    Ok(value.max(0.0))
}

/// Bound-attaining covariance matrix for a symmetric drift with decoupled
/// q and p sectors.
///
/// The two sectors are co-diagonalized; each co-eigenvector pairs a q
/// direction with its conjugate p direction. Within a pair, the direction
/// with the less negative drift eigenvalue takes the maximal variance
/// `1 / alpha` allowed by the Riccati inequality and its conjugate takes
/// `alpha`, so every pair is pure and the saturated directions pin the
/// Riccati margin at zero. Any wrong pairing fails the postcondition check.
pub fn optimal_cm(a: &DriftMatrix) -> Result<CovarianceMatrix> {
    let am = a.matrix();
    let d = am.rows();
    let n = d / 2;
    if !a.is_stable() {
        return Err(Error::Unstable {
            margin: a.stability_margin(),
        });
    }
    let scale = am.max_abs().max(1.0);
    if am.max_asymmetry() > 1e-10 * scale {
        return Err(Error::ConstructionFailed {
            reason: format!(
                "drift is not symmetric (worst asymmetry {:.3e})",
                am.max_asymmetry()
            ),
        });
    }
    let mut cross = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            cross = cross.max(am.get(2 * i, 2 * j + 1).abs());
            cross = cross.max(am.get(2 * i + 1, 2 * j).abs());
        }
    }
    if cross > 1e-10 * scale {
        return Err(Error::ConstructionFailed {
            reason: format!("drift couples q and p sectors (worst entry {cross:.3e})"),
        });
    }

    let aq = SymMatrix::from_matrix(&Matrix::from_fn(n, n, |i, j| am.get(2 * i, 2 * j)));
    let ap = SymMatrix::from_matrix(&Matrix::from_fn(n, n, |i, j| am.get(2 * i + 1, 2 * j + 1)));
    let eig_q = sym_eig(&aq)?;
    let mut w = eig_q.vectors;

    // Within each degenerate cluster of the q sector, rotate the basis to
    // diagonalize the projected p sector as well.
    let cluster_gap = 1e-8 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig_q.values[end] - eig_q.values[end - 1]).abs() <= cluster_gap {
            end += 1;
        }
        if end - start > 1 {
            let len = end - start;
            let block = SymMatrix::from_matrix(&Matrix::from_fn(len, len, |r, c| {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += w.get(i, start + r) * ap.get(i, j) * w.get(j, start + c);
                    }
                }
                acc
            }));
            let sub = sym_eig(&block)?;
            let rotated = Matrix::from_fn(n, len, |i, c| {
                (0..len)
                    .map(|r| w.get(i, start + r) * sub.vectors.get(r, c))
                    .sum()
            });
            for i in 0..n {
                for c in 0..len {
                    w.set(i, start + c, rotated.get(i, c));
                }
            }
        }
        start = end;
    }

    let apw = &(&w.t() * ap.matrix()) * &w;
    let aqw = &(&w.t() * aq.matrix()) * &w;
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(apw.get(i, j).abs()).max(aqw.get(i, j).abs());
            }
        }
    }
    if off > 1e-7 * scale {
        return Err(Error::ConstructionFailed {
            reason: format!(
                "q and p sectors are not simultaneously diagonalizable (off-diagonal {off:.3e})"
            ),
        });
    }

    let mut sigma = Matrix::zeros(d, d);
    for idx in 0..n {
        let alpha_q = -2.0 * aqw.get(idx, idx);
        let alpha_p = -2.0 * apw.get(idx, idx);
        if alpha_q <= 0.0 || alpha_p <= 0.0 {
            return Err(Error::ConstructionFailed {
                reason: format!("non-positive sector eigenvalues ({alpha_q:.3e}, {alpha_p:.3e})"),
            });
        }
        let (vq, vp) = if alpha_q <= alpha_p {
            (1.0 / alpha_q, alpha_q)
        } else {
            (alpha_p, 1.0 / alpha_p)
        };
        for i in 0..n {
            for j in 0..n {
                let wij = w.get(i, idx) * w.get(j, idx);
                let cur_q = sigma.get(2 * i, 2 * j);
                sigma.set(2 * i, 2 * j, cur_q + vq * wij);
                let cur_p = sigma.get(2 * i + 1, 2 * j + 1);
                sigma.set(2 * i + 1, 2 * j + 1, cur_p + vp * wij);
            }
        }
    }

    let cm = CovarianceMatrix::new(SymMatrix::from_matrix(&sigma))?;
    let rep = is_stabilising_solution(&cm, am, TOL_BOUNDARY)?;
    if !rep.stabilising {
        return Err(Error::ConstructionFailed {
            reason: format!(
                "postcondition failed: Riccati margin {:.3e}, physicality margin {:.3e}",
                rep.riccati_min_eig, rep.physical_min_eig
            ),
        });
    }
    Ok(cm)
}

/// Local direct-feedback loop on the reduced two-mode model: homodyne the
/// two p quadratures and cross-drive with gains `mu1` and `mu2 = mu1 n / m`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocalFeedbackScheme {
    pub mu1: f64,
    pub mu2: f64,
}

impl LocalFeedbackScheme {
    /// `mu2 = mu1 * n / m`, the ratio at which the steady-state negativity
    /// is maximal over the two-gain family.
    pub fn new(m: usize, n: usize, mu1: f64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidArgument(format!(
                "party sizes must be positive, got {m}:{n}"
            )));
        }
        if !mu1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mu1 must be finite, got {mu1}"
            )));
        }
        Ok(Self {
            mu1,
            mu2: mu1 * n as f64 / m as f64,
        })
    }

    /// U with `U_33 = U_44 = 1` and zeros elsewhere: p homodyne on both
    /// reduced modes.
    pub fn unravelling(&self) -> UnravellingMatrix {
        UnravellingMatrix::from_upsilon(&UpsilonMatrix::homodyne_p(2))
            .expect("p homodyne is a valid unravelling")
    }

    /// Gain product `M = B F`: `sqrt(2) M_24 = mu2`, `sqrt(2) M_43 = mu1`
    /// (1-indexed), all other entries zero.
    pub fn gain(&self) -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        m.set(1, 3, self.mu2 / std::f64::consts::SQRT_2);
        m.set(3, 2, self.mu1 / std::f64::consts::SQRT_2);
        m
    }
}

/// Steady state of the closed local-feedback loop.
#[derive(Clone, Debug)]
pub struct LocalSteady {
    pub sigma: CovarianceMatrix,
    /// Squared smallest PT symplectic eigenvalue across the reduced 1:1 split.
    pub nu_sq: f64,
    pub scheme: LocalFeedbackScheme,
    /// Largest eigenvalue of `A' + A'^T`.
    pub closed_loop_margin: f64,
}

/// Solve the closed-loop steady state `A' sigma + sigma A'^T + D' = 0` for
/// the local scheme at gain `mu1` (with `mu2 = mu1 n / m`).
pub fn local_feedback_steady(m: usize, n: usize, chi: f64, mu1: f64) -> Result<LocalSteady> {
    let a = reduced_drift(m, n, chi)?;
    let scheme = LocalFeedbackScheme::new(m, n, mu1)?;
    let c = measurement_matrix(&scheme.unravelling())?;
    let (a_prime, d_prime) = modified_dynamics(a.matrix(), &scheme.gain(), &c)?;
    if !a_prime.is_stable() {
        return Err(Error::UnstableLoop {
            mu1,
            margin: a_prime.stability_margin(),
        });
    }
    let sigma = crate::linalg::solve_lyapunov(a_prime.matrix(), &d_prime)?;
    let cm = CovarianceMatrix::new(sigma)?;
    let part = Bipartition::first_m(1, 2)?;
    let nu = pt_min_symplectic(&cm, &part)?;
    Ok(LocalSteady {
        sigma: cm,
        nu_sq: nu * nu,
        scheme,
        closed_loop_margin: a_prime.stability_margin(),
    })
}

/// Result of the one-parameter gain optimization.
#[derive(Clone, Debug, Serialize)]
pub struct LocalOptimum {
    pub mu1_star: f64,
    pub nu_sq_min: f64,
    /// Logarithmic negativity at the optimum, in ebits.
    pub en: f64,
}

/// Minimize the squared PT symplectic eigenvalue of the local-feedback
/// steady state over the stable gain interval.
///
/// The stable `mu1` interval around zero is bracketed by bisection on the
/// closed-loop stability margin, then the (unimodal, edge-diverging)
/// objective is minimized by golden-section search to `|d mu1| < 1e-8`.
pub fn optimize_local_feedback(m: usize, n: usize, chi: f64) -> Result<LocalOptimum> {
    require_stable(m + n, chi)?;
    let margin = |mu1: f64| -> f64 {
        let a = reduced_drift(m, n, chi).expect("validated above");
        let scheme = LocalFeedbackScheme::new(m, n, mu1).expect("validated above");
        let c = measurement_matrix(&scheme.unravelling()).expect("fixed unravelling");
        match modified_dynamics(a.matrix(), &scheme.gain(), &c) {
            Ok((a_prime, _)) => a_prime.stability_margin(),
            Err(_) => f64::INFINITY,
        }
    };
    if margin(0.0) >= 0.0 {
        return Err(Error::Unstable {
            margin: margin(0.0),
        });
    }

    let edge_hi = locate_edge(&margin, 1.0);
    let edge_lo = locate_edge(&margin, -1.0);

    let objective = |mu1: f64| match local_feedback_steady(m, n, chi, mu1) {
        Ok(s) => s.nu_sq,
        Err(_) => f64::INFINITY,
    };
    let (mu1_star, nu_sq_min) = golden_section_min(objective, edge_lo, edge_hi, 1e-8);
    if !nu_sq_min.is_finite() {
        return Err(Error::UnstableLoop {
            mu1: mu1_star,
            margin: margin(mu1_star),
        });
    }
    Ok(LocalOptimum {
        mu1_star,
        nu_sq_min,
        en: (-0.5 * nu_sq_min.log2()).max(0.0),
    })
}

/// Walk outward from zero in the given direction until the loop goes
/// unstable, then bisect the stability edge.
fn locate_edge(margin: &impl Fn(f64) -> f64, direction: f64) -> f64 {
    let mut step = direction;
    let mut last_stable = 0.0;
    for _ in 0..60 {
        if margin(step) >= 0.0 {
            return bisect_boundary(margin, last_stable, step, 1e-12 * step.abs().max(1.0));
        }
        last_stable = step;
        step *= 2.0;
    }
    last_stable
}

/// One grid point of a chi sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub chi: f64,
    /// Squared PT symplectic eigenvalue of the free steady state.
    pub nu_free: Option<f64>,
    /// Optimized local-feedback value.
    pub nu_local: Option<f64>,
    /// Lower bound `alpha_1 alpha_2`.
    pub nu_bound: Option<f64>,
    pub mu1_star: Option<f64>,
    pub status: String,
}

/// Sweep the chi grid for an m:n split. Failures are recorded per row and
/// the sweep continues; rows come back in grid order.
pub fn sweep_chi(m: usize, n: usize, chi_grid: &[f64]) -> Vec<SweepRow> {
    chi_grid
        .par_iter()
        .map(|&chi| sweep_point(m, n, chi))
        .collect()
}

fn sweep_point(m: usize, n: usize, chi: f64) -> SweepRow {
    let mut row = SweepRow {
        chi,
        nu_free: None,
        nu_local: None,
        nu_bound: None,
        mu1_star: None,
        status: "ok".into(),
    };
    let outcome = (|| -> Result<()> {
        let a = reduced_drift(m, n, chi)?;
        let bound = entanglement_bound(&a)?;
        row.nu_bound = Some(bound.nu_sq_bound);
        let free = steady_state_cm(&a)?;
        let part = Bipartition::first_m(1, 2)?;
        let nu = pt_min_symplectic(&free, &part)?;
        row.nu_free = Some(nu * nu);
        let opt = optimize_local_feedback(m, n, chi)?;
        row.nu_local = Some(opt.nu_sq_min);
        row.mu1_star = Some(opt.mu1_star);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.status = e.to_string();
    }
    row
}

/// Uniform grid of `steps` points from `start` to `stop` inclusive.
pub fn chi_grid(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "chi grid needs at least one point".into(),
        ));
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(Error::InvalidArgument(format!(
            "bad chi range {start}..{stop}"
        )));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (steps as f64 - 1.0);
    Ok((0..steps).map(|i| start + h * i as f64).collect())
}
