//! Continuous-measurement machinery: unravelling matrices, the measurement
//! matrix, the stabilising-solution characterization, the entanglement bound,
//! and the optimal-unravelling reconstruction.
//!
//! A covariance matrix `sigma` is reachable as the steady conditional state
//! of some general-dyne monitoring of the environment iff
//!
//! ```text
//! A sigma + sigma A^T + 1 >= 0     and     sigma + i Omega >= 0.
//! ```
//!
//! For any stable drift the logarithmic negativity of such states across
//! 1:(N-1) and bi-symmetric bipartitions is bounded by
//! `max[0, -log2(alpha_1 alpha_2) / 2]`, with `alpha_j` the two smallest
//! eigenvalues of `-A - A^T`.

use crate::dynamics::DriftMatrix;
use crate::error::{Error, Result};
use crate::linalg::{min_eig_sym, sqrtm_psd, sym_eig, Matrix, SymMatrix};
use crate::symplectic::{check_physical, CovarianceMatrix};
use crate::tol::{TOL_BOUNDARY, TOL_PSD};

/// Complex parametrization of a general-dyne measurement, split into real
/// and imaginary parts.
#[derive(Clone, Debug)]
pub struct UpsilonMatrix {
    re: Matrix,
    im: Matrix,
}

impl UpsilonMatrix {
    pub fn new(re: Matrix, im: Matrix) -> Result<Self> {
        if !re.is_square() || re.rows() != im.rows() || !im.is_square() {
            return Err(Error::ShapeMismatch {
                expected: "two square N x N matrices".into(),
                got: format!(
                    "{}x{} and {}x{}",
                    re.rows(),
                    re.cols(),
                    im.rows(),
                    im.cols()
                ),
            });
        }
        re.validate_finite()?;
        im.validate_finite()?;
        Ok(Self { re, im })
    }

    /// Upsilon = 0: heterodyne detection of every mode.
    pub fn heterodyne(n_modes: usize) -> Self {
        Self {
            re: Matrix::zeros(n_modes, n_modes),
            im: Matrix::zeros(n_modes, n_modes),
        }
    }

    /// Upsilon = -1: homodyne detection of every p quadrature.
    pub fn homodyne_p(n_modes: usize) -> Self {
        Self {
            re: Matrix::identity(n_modes).scale(-1.0),
            im: Matrix::zeros(n_modes, n_modes),
        }
    }

    /// Upsilon = +1: homodyne detection of every q quadrature.
    pub fn homodyne_q(n_modes: usize) -> Self {
        Self {
            re: Matrix::identity(n_modes),
            im: Matrix::zeros(n_modes, n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.re.rows()
    }
}

/// Symmetric PSD matrix selecting which general-dyne measurement is
/// performed on the environment. Indices live in the current ordering
/// (q currents first, then p currents).
#[derive(Clone, Debug)]
pub struct UnravellingMatrix {
    u: SymMatrix,
}

impl UnravellingMatrix {
    /// Block assembly
    /// `U = [[1 + Re Y, Im Y], [Im Y, 1 - Re Y]] / 2`.
    ///
    /// Validity (symmetry of the blocks and positive semidefiniteness) is
    /// checked and reported, never silently repaired.
    pub fn from_upsilon(y: &UpsilonMatrix) -> Result<Self> {
        let n = y.n_modes();
        let asym_re = y.re.max_asymmetry();
        let asym_im = y.im.max_asymmetry();
        if asym_re.max(asym_im) > TOL_PSD {
            return Err(Error::InvalidUnravelling {
                reason: format!(
                    "Upsilon blocks are not symmetric (worst asymmetry {:.3e})",
                    asym_re.max(asym_im)
                ),
                min_eig: f64::NAN,
            });
        }
        let m = Matrix::from_fn(2 * n, 2 * n, |i, j| {
            let v = match (i < n, j < n) {
                (true, true) => (if i == j { 1.0 } else { 0.0 }) + y.re.get(i, j),
                (true, false) => y.im.get(i, j - n),
                (false, true) => y.im.get(i - n, j),
                (false, false) => (if i == j { 1.0 } else { 0.0 }) - y.re.get(i - n, j - n),
            };
            0.5 * v
        });
        Self::from_sym(SymMatrix::from_matrix(&m), TOL_PSD)
    }

    /// Validate an explicitly assembled candidate.
    pub fn from_sym(u: SymMatrix, tol: f64) -> Result<Self> {
        if !u.dim().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "unravelling dimension must be even, got {}",
                u.dim()
            )));
        }
        let min_eig = min_eig_sym(&u)?;
        if min_eig < -tol {
            return Err(Error::InvalidUnravelling {
                reason: "not positive semidefinite".into(),
                min_eig,
            });
        }
        Ok(Self { u })
    }

    pub fn n_modes(&self) -> usize {
        self.u.dim() / 2
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.u
    }

    pub fn matrix(&self) -> &Matrix {
        self.u.matrix()
    }
}

/// Fixed selector mapping phase space (q1, p1, ..., qN, pN) to the output
/// ordering (q currents, then p currents):
/// `Cbar_jk = (delta_{2j-1,k} + delta_{2(j-N),k}) / sqrt(2)` (1-indexed).
pub fn cbar(n_modes: usize) -> Matrix {
    let d = 2 * n_modes;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(d, d, |i, j| {
        let (jj, kk) = (i + 1, j + 1);
        let mut v = 0.0;
        if 2 * jj - 1 == kk {
            v += inv_sqrt2;
        }
        if jj >= n_modes && 2 * (jj - n_modes) == kk {
            v += inv_sqrt2;
        }
        v
    })
}

/// Measurement matrix `C = 2 U^{1/2} Cbar` entering the current
/// `y = C <x> + dw/dt`.
pub fn measurement_matrix(u: &UnravellingMatrix) -> Result<Matrix> {
    let half = sqrtm_psd(u.sym())?;
    Ok((half.matrix() * &cbar(u.n_modes())).scale(2.0))
}

/// Outcome of the stabilising-solution test.
#[derive(Clone, Debug)]
pub struct StabilisingReport {
    pub stabilising: bool,
    /// Minimum eigenvalue of `A sigma + sigma A^T + 1`.
    pub riccati_min_eig: f64,
    /// Minimum eigenvalue of the physicality embedding of sigma.
    pub physical_min_eig: f64,
}

/// Test whether `sigma` is a stabilising solution of the conditional
/// dynamics generated by `a`: both `A sigma + sigma A^T + 1 >= 0` and
/// `sigma + i Omega >= 0` within `tol`.
pub fn is_stabilising_solution(
    sigma: &CovarianceMatrix,
    a: &Matrix,
    tol: f64,
) -> Result<StabilisingReport> {
    let d = a.rows();
    if !a.is_square() || sigma.matrix().rows() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} drift and state", sigma.matrix().rows()),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let asm = a * sigma.matrix();
    let riccati = SymMatrix::from_matrix(&(&(&asm + &asm.t()) + &Matrix::identity(d)));
    let riccati_min_eig = min_eig_sym(&riccati)?;
    let physical_min_eig = check_physical(sigma, tol)?.min_embedding_eig;
    Ok(StabilisingReport {
        stabilising: riccati_min_eig >= -tol && physical_min_eig >= -tol,
        riccati_min_eig,
        physical_min_eig,
    })
}

/// The two smallest eigenvalues of `-A - A^T` and the entanglement bound
/// they imply.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub alpha1: f64,
    pub alpha2: f64,
    /// Lower bound on the squared smallest PT symplectic eigenvalue.
    pub nu_sq_bound: f64,
    /// Upper bound on the logarithmic negativity, in ebits.
    pub en_bound: f64,
}

/// Maximal steady-state entanglement achievable by continuous measurements
/// and linear driving under the drift `a`.
pub fn entanglement_bound(a: &DriftMatrix) -> Result<BoundReport> {
    if !a.is_stable() {
        return Err(Error::Unstable {
            margin: a.stability_margin(),
        });
    }
    let neg_sym = SymMatrix::from_matrix(&-&(a.matrix() + &a.matrix().t()));
    let eig = sym_eig(&neg_sym)?;
    let (alpha1, alpha2) = (eig.values[0], eig.values[1]);
    let nu_sq_bound = alpha1 * alpha2;
    let en_bound = (-0.5 * nu_sq_bound.log2()).max(0.0);
    Ok(BoundReport {
        alpha1,
        alpha2,
        nu_sq_bound,
        en_bound,
    })
}

/// Reconstruct the unravelling that reaches a given stabilising solution:
/// `U = E (A sigma + sigma A^T + 1) E^T` with `E = 2 Cbar sigma - Cbar`.
///
/// The output is validated symmetric PSD; failure signals that `sigma` is
/// not an achievable target and is reported, not repaired.
pub fn optimal_unravelling(a: &Matrix, sigma: &CovarianceMatrix) -> Result<UnravellingMatrix> {
    optimal_unravelling_tol(a, sigma, TOL_BOUNDARY)
}

/// [`optimal_unravelling`] with an explicit PSD validation tolerance.
pub fn optimal_unravelling_tol(
    a: &Matrix,
    sigma: &CovarianceMatrix,
    tol: f64,
) -> Result<UnravellingMatrix> {
    let d = a.rows();
    if !a.is_square() || sigma.matrix().rows() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} drift and state", sigma.matrix().rows()),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let cb = cbar(sigma.n_modes());
    let e = &(&cb * sigma.matrix()).scale(2.0) - &cb;
    let asm = a * sigma.matrix();
    let residual = &(&asm + &asm.t()) + &Matrix::identity(d);
    let u = &(&e * &residual) * &e.t();
    UnravellingMatrix::from_sym(SymMatrix::from_matrix(&u), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{drift_from_hamiltonian, steady_state_cm, HamiltonianMatrix};

    #[test]
    fn heterodyne_and_homodyne_blocks() {
        let u = UnravellingMatrix::from_upsilon(&UpsilonMatrix::heterodyne(2)).unwrap();
        assert!((u.matrix() - &Matrix::identity(4).scale(0.5)).max_abs() < 1e-15);

        let u = UnravellingMatrix::from_upsilon(&UpsilonMatrix::homodyne_p(2)).unwrap();
        assert!((u.matrix() - &Matrix::diag(&[0.0, 0.0, 1.0, 1.0])).max_abs() < 1e-15);

        let u = UnravellingMatrix::from_upsilon(&UpsilonMatrix::homodyne_q(2)).unwrap();
        assert!((u.matrix() - &Matrix::diag(&[1.0, 1.0, 0.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn invalid_upsilon_is_rejected() {
        // Asymmetric Im part breaks the symmetry of U.
        let im = Matrix::from_rows(&[vec![0.0, 0.4], vec![-0.4, 0.0]]);
        let y = UpsilonMatrix::new(Matrix::zeros(2, 2), im).unwrap();
        assert!(matches!(
            UnravellingMatrix::from_upsilon(&y),
            Err(Error::InvalidUnravelling { .. })
        ));

        // |Re Y| > 1 makes a block indefinite.
        let y = UpsilonMatrix::new(Matrix::identity(1).scale(3.0), Matrix::zeros(1, 1)).unwrap();
        assert!(matches!(
            UnravellingMatrix::from_upsilon(&y),
            Err(Error::InvalidUnravelling { .. })
        ));
    }

    #[test]
    fn cbar_selects_quadratures() {
        let c = cbar(1);
        assert!(
            (&c - &Matrix::identity(2).scale(std::f64::consts::FRAC_1_SQRT_2)).max_abs() < 1e-15
        );

        // N = 2: rows pick (q1, q2, p1, p2)/sqrt(2) from ordering (q1, p1, q2, p2).
        let c = cbar(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = Matrix::from_rows(&[
            vec![s, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, s, 0.0],
            vec![0.0, s, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, s],
        ]);
        assert!((&c - &expect).max_abs() < 1e-15);

        for n in 1..=4 {
            let c = cbar(n);
            let prod = &c * &c.t();
            assert!(
                (&prod - &Matrix::identity(2 * n).scale(0.5)).max_abs() < 1e-15,
                "n={n}"
            );
        }
    }

    #[test]
    fn measurement_matrix_for_p_homodyne() {
        let u = UnravellingMatrix::from_upsilon(&UpsilonMatrix::homodyne_p(2)).unwrap();
        let c = measurement_matrix(&u).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        let expect = Matrix::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, s2, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, s2],
        ]);
        assert!((&c - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn measurement_matrix_scalar_cases() {
        // U = 1/2 has sqrt(U) = 1/sqrt(2), so C = sqrt(2) Cbar.
        let u = UnravellingMatrix::from_upsilon(&UpsilonMatrix::heterodyne(2)).unwrap();
        let c = measurement_matrix(&u).unwrap();
        assert!((&c - &cbar(2).scale(std::f64::consts::SQRT_2)).max_abs() < 1e-12);

        // U = 0 extracts no information.
        let u = UnravellingMatrix::from_sym(SymMatrix::zeros(4), TOL_PSD).unwrap();
        assert!(measurement_matrix(&u).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn free_steady_state_saturates_the_riccati_inequality() {
        let h = HamiltonianMatrix::new(SymMatrix::from_rows(&[
            vec![0.0, 0.0, 0.0, 0.5],
            vec![0.0, 0.0, 0.5, 0.0],
            vec![0.0, 0.5, 0.0, 0.0],
            vec![0.5, 0.0, 0.0, 0.0],
        ]))
        .unwrap();
        let a = drift_from_hamiltonian(&h);
        let sf = steady_state_cm(&a).unwrap();
        let rep = is_stabilising_solution(&sf, a.matrix(), TOL_BOUNDARY).unwrap();
        assert!(rep.stabilising);
        assert!(
            rep.riccati_min_eig.abs() < 1e-10,
            "margin {}",
            rep.riccati_min_eig
        );
    }

    #[test]
    fn no_measurement_needed_at_the_vacuum_fixed_point() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(2));
        let sf = steady_state_cm(&a).unwrap();
        let u = optimal_unravelling(a.matrix(), &sf).unwrap();
        assert!(u.matrix().max_abs() < 1e-12);
    }

    #[test]
    fn bound_for_pure_damping_is_zero() {
        let a = drift_from_hamiltonian(&HamiltonianMatrix::zeros(2));
        let rep = entanglement_bound(&a).unwrap();
        assert!((rep.alpha1 - 1.0).abs() < 1e-12);
        assert!((rep.alpha2 - 1.0).abs() < 1e-12);
        assert_eq!(rep.en_bound, 0.0);
    }

    #[test]
    fn unstable_drift_is_rejected() {
        let a = DriftMatrix::from_matrix(Matrix::diag(&[0.1, -1.0])).unwrap();
        assert!(matches!(
            entanglement_bound(&a),
            Err(Error::Unstable { .. })
        ));
    }
}
