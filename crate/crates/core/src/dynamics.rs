//! Open-system Gaussian dynamics under quadratic Hamiltonians and pure losses.
//!
//! Time is measured in units of the loss rate, so the damping contribution to
//! the drift is exactly `-1/2` per quadrature and the diffusion matrix of the
//! unconditional moment equation is the identity:
//!
//! ```text
//! d<x>/dt    = A <x> + B u(t)
//! d sigma/dt = A sigma + sigma A^T + 1,      A = (Omega H - 1) / 2
//! ```

use crate::error::{Error, Result};
use crate::linalg::{min_eig_sym, solve_lyapunov, Matrix, SymMatrix};
use crate::symplectic::{check_physical, omega, CovarianceMatrix, MeanVector};
use crate::tol::TOL_BOUNDARY;

/// Real symmetric matrix of the quadratic Hamiltonian, in loss-rate units.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    h: SymMatrix,
}

impl HamiltonianMatrix {
    pub fn new(h: SymMatrix) -> Result<Self> {
        if !h.dim().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Hamiltonian matrix dimension must be even, got {}",
                h.dim()
            )));
        }
        h.validate_finite()?;
        Ok(Self { h })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            h: SymMatrix::zeros(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.h.dim() / 2
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.h
    }

    pub fn matrix(&self) -> &Matrix {
        self.h.matrix()
    }
}

/// Generator of the deterministic part of the moment dynamics, with its
/// stability margin (largest eigenvalue of `A + A^T`) cached at construction.
#[derive(Clone, Debug)]
pub struct DriftMatrix {
    a: Matrix,
    margin: f64,
}

impl DriftMatrix {
    /// `A = (Omega H - 1) / 2`.
    pub fn from_hamiltonian(h: &HamiltonianMatrix) -> Self {
        let d = 2 * h.n_modes();
        let w = omega(h.n_modes());
        let a = (&(w.matrix() * h.matrix()) - &Matrix::identity(d)).scale(0.5);
        Self::from_matrix(a).expect("drift built from a valid Hamiltonian matrix")
    }

    /// Wrap an arbitrary square even-dimensional drift.
    pub fn from_matrix(a: Matrix) -> Result<Self> {
        if !a.is_square() || !a.rows().is_multiple_of(2) {
            return Err(Error::ShapeMismatch {
                expected: "square matrix of even dimension".into(),
                got: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        a.validate_finite()?;
        let sym = SymMatrix::from_matrix(&(&a + &a.t()));
        let margin = max_eig(&sym)?;
        Ok(Self { a, margin })
    }

    pub fn n_modes(&self) -> usize {
        self.a.rows() / 2
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    /// Largest eigenvalue of `A + A^T`; stability means this is negative.
    pub fn stability_margin(&self) -> f64 {
        self.margin
    }

    pub fn is_stable(&self) -> bool {
        self.margin < 0.0
    }
}

fn max_eig(s: &SymMatrix) -> Result<f64> {
    Ok(-min_eig_sym(&s.scale(-1.0))?)
}

/// Construct the drift matrix of a quadratic Hamiltonian with unit losses.
pub fn drift_from_hamiltonian(h: &HamiltonianMatrix) -> DriftMatrix {
    DriftMatrix::from_hamiltonian(h)
}

/// Coupling of the time-dependent linear drive into the moment equations.
#[derive(Clone, Debug)]
pub struct DriveMatrix {
    b: Matrix,
}

impl DriveMatrix {
    pub fn new(b: Matrix) -> Result<Self> {
        b.validate_finite()?;
        Ok(Self { b })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.b
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }
}

/// Steady state of `d sigma/dt = A sigma + sigma A^T + 1`.
pub fn steady_state_cm(a: &DriftMatrix) -> Result<CovarianceMatrix> {
    if !a.is_stable() {
        return Err(Error::Unstable {
            margin: a.stability_margin(),
        });
    }
    let d = a.matrix().rows();
    let sigma = solve_lyapunov(a.matrix(), &SymMatrix::identity(d))?;
    let cm = CovarianceMatrix::new(sigma)?;
    let rep = check_physical(&cm, TOL_BOUNDARY)?;
    if !rep.physical {
        return Err(Error::Unphysical {
            reason: format!(
                "steady state violates the uncertainty relation \
                 (min embedding eigenvalue {:.3e}); drift is not a lossy quantum generator",
                rep.min_embedding_eig
            ),
        });
    }
    Ok(cm)
}

/// Covariance-matrix trajectory from a fixed-step integration.
#[derive(Clone, Debug)]
pub struct CmTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

impl CmTrajectory {
    pub fn last(&self) -> &CovarianceMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }
}

/// Integrate `d sigma/dt = A sigma + sigma A^T + 1` with fixed-step RK4,
/// re-symmetrizing after every step.
pub fn evolve_cm(
    a: &DriftMatrix,
    sigma0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CmTrajectory> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {dt}"
        )));
    }
    if t_final < 0.0 || !t_final.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "final time must be non-negative, got {t_final}"
        )));
    }
    if sigma0.matrix().rows() != a.matrix().rows() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} state", a.matrix().rows()),
            got: format!("{0}x{0}", sigma0.matrix().rows()),
        });
    }
    let rep = check_physical(sigma0, TOL_BOUNDARY)?;
    if !rep.physical {
        return Err(Error::Unphysical {
            reason: format!(
                "initial state (min embedding eigenvalue {:.3e})",
                rep.min_embedding_eig
            ),
        });
    }

    let d = a.matrix().rows();
    let ident = Matrix::identity(d);
    let rhs = |s: &Matrix| -> Matrix {
        let asm = a.matrix() * s;
        &(&asm + &asm.t()) + &ident
    };

    let n_steps = (t_final / dt).ceil() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut s = sigma0.matrix().clone();
    times.push(0.0);
    states.push(sigma0.clone());
    for step in 0..n_steps {
        let h = dt.min(t_final - step as f64 * dt);
        if h <= 0.0 {
            break;
        }
        let k1 = rhs(&s);
        let k2 = rhs(&(&s + &k1.scale(h / 2.0)));
        let k3 = rhs(&(&s + &k2.scale(h / 2.0)));
        let k4 = rhs(&(&s + &k3.scale(h)));
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(2.0);
        s = &s + &incr.scale(h / 6.0);
        let sym = SymMatrix::from_matrix(&s);
        s = sym.matrix().clone();
        times.push((step as f64) * dt + h);
        states.push(CovarianceMatrix::new(sym)?);
    }
    Ok(CmTrajectory { times, states })
}

/// First-moment trajectory from a fixed-step integration.
#[derive(Clone, Debug)]
pub struct MeanTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<MeanVector>,
}

impl MeanTrajectory {
    pub fn last(&self) -> &MeanVector {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }
}

/// Integrate `d<x>/dt = A <x> + B u(t)` with fixed-step RK4.
pub fn evolve_mean(
    a: &DriftMatrix,
    b: &DriveMatrix,
    u: impl Fn(f64) -> Vec<f64>,
    x0: &MeanVector,
    t_final: f64,
    dt: f64,
) -> Result<MeanTrajectory> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let d = a.matrix().rows();
    if x0.values().len() != d || b.matrix().rows() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{d}-dimensional mean and {d}xk drive"),
            got: format!(
                "{} and {}x{}",
                x0.values().len(),
                b.matrix().rows(),
                b.matrix().cols()
            ),
        });
    }

    let deriv = |t: f64, x: &[f64]| -> Result<Vec<f64>> {
        let ut = u(t);
        if ut.len() != b.inputs() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} drive inputs", b.inputs()),
                got: format!("{}", ut.len()),
            });
        }
        let mut out = vec![0.0; d];
        for (i, oi) in out.iter_mut().enumerate() {
            let mut v = 0.0;
            for (j, xj) in x.iter().enumerate() {
                v += a.matrix().get(i, j) * xj;
            }
            for (j, uj) in ut.iter().enumerate() {
                v += b.matrix().get(i, j) * uj;
            }
            *oi = v;
        }
        Ok(out)
    };

    let n_steps = (t_final / dt).ceil() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut x: Vec<f64> = x0.values().to_vec();
    times.push(0.0);
    states.push(x0.clone());
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(xi, ki)| xi + h * ki).collect()
    };
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let h = dt.min(t_final - t);
        if h <= 0.0 {
            break;
        }
        let k1 = deriv(t, &x)?;
        let k2 = deriv(t + h / 2.0, &axpy(&x, &k1, h / 2.0))?;
        let k3 = deriv(t + h / 2.0, &axpy(&x, &k2, h / 2.0))?;
        let k4 = deriv(t + h, &axpy(&x, &k3, h))?;
        for i in 0..d {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        times.push(t + h);
        states.push(MeanVector::new(x.clone())?);
    }
    Ok(MeanTrajectory { times, states })
}

/// Drift and diffusion of the unconditional dynamics under direct feedback
/// of the measurement current with gain product `M = B F`:
///
/// ```text
/// A' = A + M C
/// D' = 1 - (M C)^T - M C + 2 M M^T
/// ```
pub fn modified_dynamics(a: &Matrix, m: &Matrix, c: &Matrix) -> Result<(DriftMatrix, SymMatrix)> {
    let d = a.rows();
    if !a.is_square() || m.rows() != d || c.cols() != d || m.cols() != c.rows() {
        return Err(Error::ShapeMismatch {
            expected: format!("A {d}x{d}, M {d}xr, C rx{d}"),
            got: format!(
                "A {}x{}, M {}x{}, C {}x{}",
                a.rows(),
                a.cols(),
                m.rows(),
                m.cols(),
                c.rows(),
                c.cols()
            ),
        });
    }
    let mc = m * c;
    let a_prime = a + &mc;
    let mmt = m * &m.t();
    let d_prime = &(&(&Matrix::identity(d) - &mc.t()) - &mc) + &mmt.scale(2.0);
    Ok((
        DriftMatrix::from_matrix(a_prime)?,
        SymMatrix::from_matrix(&d_prime),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lyapunov_residual;

    #[test]
    fn zero_hamiltonian_gives_pure_damping() {
        let h = HamiltonianMatrix::zeros(2);
        let a = drift_from_hamiltonian(&h);
        assert!((a.matrix() - &Matrix::identity(4).scale(-0.5)).max_abs() < 1e-15);
        assert!(a.is_stable());
        assert!((a.stability_margin() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_term_shifts_eigenvalues_onto_half_line() {
        // H = w * 1 gives A = (w Omega - 1)/2, whose eigenvalues are
        // -1/2 +- i w/2. Checked algebraically: A + A^T = -1 and
        // (A + 1/2)^2 = -(w/2)^2 * 1.
        let w = 1.3;
        let h = HamiltonianMatrix::new(SymMatrix::identity(4).scale(w)).unwrap();
        let a = drift_from_hamiltonian(&h);
        let sym = &(a.matrix() + &a.matrix().t()) + &Matrix::identity(4);
        assert!(sym.max_abs() < 1e-14);
        let shifted = &(a.matrix() + &Matrix::identity(4).scale(0.5));
        let sq = shifted * shifted;
        let expect = Matrix::identity(4).scale(-(w / 2.0) * (w / 2.0));
        assert!((&sq - &expect).max_abs() < 1e-13);
        assert!((a.stability_margin() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_damping_steady_state_is_vacuum() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(3));
        let s = steady_state_cm(&a).unwrap();
        assert!((s.matrix() - &Matrix::identity(6)).max_abs() < 1e-12);
    }

    #[test]
    fn steady_state_residual_is_tiny() {
        let h = HamiltonianMatrix::new(SymMatrix::from_rows(&[
            vec![0.1, 0.0, 0.0, 0.4],
            vec![0.0, -0.2, 0.4, 0.0],
            vec![0.0, 0.4, 0.3, 0.0],
            vec![0.4, 0.0, 0.0, 0.0],
        ]))
        .unwrap();
        let a = drift_from_hamiltonian(&h);
        assert!(a.is_stable());
        let s = steady_state_cm(&a).unwrap();
        let q = SymMatrix::identity(4);
        assert!(lyapunov_residual(a.matrix(), s.sigma(), &q) < 1e-9);
    }

    #[test]
    fn vacuum_stays_vacuum() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(1));
        let traj = evolve_cm(&a, &CovarianceMatrix::vacuum(1), 2.0, 1e-2).unwrap();
        assert!((traj.last().matrix() - &Matrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn thermal_relaxation_matches_closed_form() {
        // For A = -1/2: sigma(t) = 1 + e^{-t} (sigma0 - 1).
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(1));
        let sigma0 = CovarianceMatrix::new(SymMatrix::identity(2).scale(2.0)).unwrap();
        let t = 1.5;
        let traj = evolve_cm(&a, &sigma0, t, 1e-3).unwrap();
        let expect = 1.0 + f64::exp(-t);
        assert!((traj.last().matrix().get(0, 0) - expect).abs() < 1e-9);
        assert!((traj.last().matrix().get(1, 1) - expect).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_steps_and_unphysical_starts() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(1));
        let vac = CovarianceMatrix::vacuum(1);
        assert!(matches!(
            evolve_cm(&a, &vac, 1.0, 0.0),
            Err(Error::InvalidArgument(_))
        ));
        let bad = CovarianceMatrix::new(SymMatrix::identity(2).scale(0.5)).unwrap();
        assert!(matches!(
            evolve_cm(&a, &bad, 1.0, 1e-2),
            Err(Error::Unphysical { .. })
        ));
    }

    #[test]
    fn undriven_mean_decays() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(1));
        let b = DriveMatrix::new(Matrix::zeros(2, 1)).unwrap();
        let x0 = MeanVector::new(vec![2.0, -1.0]).unwrap();
        let t = 3.0;
        let traj = evolve_mean(&a, &b, |_| vec![0.0], &x0, t, 1e-3).unwrap();
        let decay = (-t / 2.0_f64).exp();
        assert!((traj.last().values()[0] - 2.0 * decay).abs() < 1e-9);
        assert!((traj.last().values()[1] + decay).abs() < 1e-9);

        let zero = MeanVector::zeros(1);
        let traj = evolve_mean(&a, &b, |_| vec![0.0], &zero, 1.0, 1e-2).unwrap();
        assert_eq!(traj.last().values(), &[0.0, 0.0]);
    }

    #[test]
    fn constant_drive_fixed_point() {
        // x(inf) = -A^{-1} B u = 2 B u for A = -1/2.
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(1));
        let b = DriveMatrix::new(Matrix::from_rows(&[vec![0.7], vec![-0.2]])).unwrap();
        let traj = evolve_mean(&a, &b, |_| vec![1.5], &MeanVector::zeros(1), 40.0, 1e-2).unwrap();
        assert!((traj.last().values()[0] - 2.0 * 0.7 * 1.5).abs() < 1e-7);
        assert!((traj.last().values()[1] + 2.0 * 0.2 * 1.5).abs() < 1e-7);
    }

    #[test]
    fn modified_dynamics_without_feedback_is_identity() {
        let a = Matrix::identity(4).scale(-0.5);
        let m = Matrix::zeros(4, 4);
        let c = Matrix::zeros(4, 4);
        let (ap, dp) = modified_dynamics(&a, &m, &c).unwrap();
        assert!((ap.matrix() - &a).max_abs() < 1e-15);
        assert!((dp.matrix() - &Matrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn diffusion_is_always_symmetric() {
        let a = Matrix::identity(4).scale(-0.5);
        let m = Matrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.1);
        let c = Matrix::from_fn(4, 4, |i, j| ((i * 7 + j) % 3) as f64 * 0.2);
        let (_, dp) = modified_dynamics(&a, &m, &c).unwrap();
        assert_eq!(dp.matrix().max_asymmetry(), 0.0);
    }
}
