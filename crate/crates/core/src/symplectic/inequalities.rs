//! Eigenvalue inequalities obeyed by physical covariance matrices.

use crate::error::Result;
use crate::symplectic::{pt_min_symplectic, sym_eig_values, Bipartition, CovarianceMatrix};
use crate::tol::TOL_BOUNDARY;

#[derive(Clone, Debug)]
pub struct PoincareReport {
    pub holds: bool,
    /// Minimum over k of the product of the k-th smallest and k-th largest
    /// ordinary eigenvalues of sigma; at least 1 for physical states.
    pub min_product: f64,
}

/// Check that the ascending/descending ordinary eigenvalues of a physical
/// covariance matrix pair up as `lam_up_k * lam_down_k >= 1`.
pub fn poincare_check(cm: &CovarianceMatrix) -> Result<PoincareReport> {
    let lam = sym_eig_values(cm.sigma())?;
    let d = lam.len();
    let min_product = (0..d)
        .map(|k| lam[k] * lam[d - 1 - k])
        .fold(f64::INFINITY, f64::min);
    Ok(PoincareReport {
        holds: min_product >= 1.0 - TOL_BOUNDARY,
        min_product,
    })
}

#[derive(Clone, Debug)]
pub struct SympbReport {
    pub holds: bool,
    /// Squared smallest PT symplectic eigenvalue.
    pub nu_sq: f64,
    /// Product of the two smallest ordinary eigenvalues of sigma.
    pub eig_product: f64,
}

/// Check `nu_tilde_min^2 >= lam_up_1 * lam_up_2` for the given bipartition.
pub fn sympb_check(cm: &CovarianceMatrix, part: &Bipartition) -> Result<SympbReport> {
    let lam = sym_eig_values(cm.sigma())?;
    let nu = pt_min_symplectic(cm, part)?;
    let nu_sq = nu * nu;
    let eig_product = lam[0] * lam[1];
    Ok(SympbReport {
        holds: nu_sq >= eig_product - TOL_BOUNDARY,
        nu_sq,
        eig_product,
    })
}
