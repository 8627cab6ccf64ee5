//! Symplectic spectra and the logarithmic negativity.

use crate::error::{Error, Result};
use crate::linalg::{min_eig_sym, sqrtm_psd, sym_eig, SymMatrix};
use crate::symplectic::{omega, partial_transpose, Bipartition, CovarianceMatrix};
use crate::tol::TOL_PSD;

/// Relative gap allowed between the two members of a doubled eigenvalue pair.
const PAIR_GAP: f64 = 1e-6;

/// Symplectic eigenvalues of a positive-definite covariance matrix, ascending.
///
/// Computed as the square roots of the eigenvalues of the symmetric PSD
/// matrix `sigma^{1/2} Omega^T sigma Omega sigma^{1/2}`, whose spectrum is
/// doubly degenerate; each value is reported once.
pub fn symplectic_spectrum(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    spectrum_wrt_omega(cm)
}

/// Symplectic spectrum of the partial transpose `P sigma P`.
pub fn pt_symplectic_spectrum(cm: &CovarianceMatrix, part: &Bipartition) -> Result<Vec<f64>> {
    spectrum_wrt_omega(&partial_transpose(cm, part)?)
}

/// Smallest partially transposed symplectic eigenvalue (nu-tilde-minus).
pub fn pt_min_symplectic(cm: &CovarianceMatrix, part: &Bipartition) -> Result<f64> {
    Ok(pt_symplectic_spectrum(cm, part)?[0])
}

fn spectrum_wrt_omega(cm: &CovarianceMatrix) -> Result<Vec<f64>> {
    let min_eig = min_eig_sym(cm.sigma())?;
    if min_eig <= TOL_PSD {
        return Err(Error::NotPositive { min_eig });
    }
    let w = omega(cm.n_modes());
    let half = sqrtm_psd(cm.sigma())?;
    let inner = &(&w.matrix().t() * cm.matrix()) * w.matrix();
    let m = SymMatrix::from_matrix(&(&(half.matrix() * &inner) * half.matrix()));
    let eig = sym_eig(&m)?;

    let mut out = Vec::with_capacity(cm.n_modes());
    for k in 0..cm.n_modes() {
        let a = eig.values[2 * k];
        let b = eig.values[2 * k + 1];
        let gap = (b - a).abs() / a.abs().max(b.abs()).max(1e-12);
        if gap > PAIR_GAP {
            return Err(Error::InvalidArgument(format!(
                "symplectic spectrum pairing broke: eigenvalues {a:.6e} and {b:.6e} \
                 (relative gap {gap:.3e})"
            )));
        }
        out.push((0.5 * (a + b)).max(0.0).sqrt());
    }
    Ok(out)
}

/// Which formula [`log_negativity_report`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativityForm {
    /// `-log2` of the smallest PT symplectic eigenvalue. Valid whenever at
    /// most one eigenvalue drops below one, which covers 1:(N-1) and
    /// bi-symmetric splits.
    MinEigenvalue,
    /// Sum of `-log2` over every PT symplectic eigenvalue below one.
    Sum,
}

#[derive(Clone, Debug)]
pub struct NegativityReport {
    /// Logarithmic negativity in ebits (clamped at zero).
    pub en: f64,
    /// Smallest PT symplectic eigenvalue.
    pub nu_min: f64,
    /// How many PT symplectic eigenvalues lie below one.
    pub n_below_one: usize,
    /// Set when the min-eigenvalue form was requested but more than one
    /// eigenvalue is below one, so the two forms disagree.
    pub consistency_warning: bool,
}

/// Logarithmic negativity `max(0, -log2 nu_min)` across the given bipartition.
pub fn log_negativity(cm: &CovarianceMatrix, part: &Bipartition) -> Result<f64> {
    Ok(log_negativity_report(cm, part, NegativityForm::MinEigenvalue)?.en)
}

/// Logarithmic negativity with an explicit choice of formula and full diagnostics.
pub fn log_negativity_report(
    cm: &CovarianceMatrix,
    part: &Bipartition,
    form: NegativityForm,
) -> Result<NegativityReport> {
    let nus = pt_symplectic_spectrum(cm, part)?;
    let nu_min = nus[0];
    let n_below_one = nus.iter().filter(|&&nu| nu < 1.0).count();
    let consistency_warning = form == NegativityForm::MinEigenvalue && n_below_one > 1;
    if consistency_warning {
        log::warn!(
            "{n_below_one} PT symplectic eigenvalues below one; the min-eigenvalue \
             negativity formula undercounts for this state"
        );
    }
    let en = match form {
        NegativityForm::MinEigenvalue => (-nu_min.log2()).max(0.0),
        NegativityForm::Sum => nus
            .iter()
            .filter(|&&nu| nu < 1.0)
            .map(|nu| -nu.log2())
            .sum(),
    };
    Ok(NegativityReport {
        en,
        nu_min,
        n_below_one,
        consistency_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn vacuum_spectrum_is_ones() {
        for n in 1..=4 {
            let nus = symplectic_spectrum(&CovarianceMatrix::vacuum(n)).unwrap();
            assert_eq!(nus.len(), n);
            for nu in nus {
                assert!((nu - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn squeezed_state_is_pure() {
        let r: f64 = 0.8;
        let s = SymMatrix::diag(&[(2.0 * r).exp(), (-2.0 * r).exp()]);
        let cm = CovarianceMatrix::new(s).unwrap();
        let nus = symplectic_spectrum(&cm).unwrap();
        assert!((nus[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_state_spectrum() {
        let cm = CovarianceMatrix::new(SymMatrix::identity(6).scale(2.0)).unwrap();
        for nu in symplectic_spectrum(&cm).unwrap() {
            assert!((nu - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn non_positive_sigma_is_rejected() {
        let cm = CovarianceMatrix::new(SymMatrix::diag(&[1.0, -1.0])).unwrap();
        assert!(matches!(
            symplectic_spectrum(&cm),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn vacuum_has_no_negativity() {
        let part = Bipartition::first_m(1, 2).unwrap();
        let cm = CovarianceMatrix::vacuum(2);
        assert!((pt_min_symplectic(&cm, &part).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(log_negativity(&cm, &part).unwrap(), 0.0);
    }

    #[test]
    fn two_mode_squeezed_negativity() {
        // q/p block [[ch, sh], [sh, ch]] with opposite off-diagonal signs:
        // nu_tilde_min = exp(-2r), E_N = 2r / ln 2... in log2: 2r*log2(e).
        let r: f64 = 0.6;
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let m = Matrix::from_rows(&[
            vec![ch, 0.0, sh, 0.0],
            vec![0.0, ch, 0.0, -sh],
            vec![sh, 0.0, ch, 0.0],
            vec![0.0, -sh, 0.0, ch],
        ]);
        let cm = CovarianceMatrix::new(SymMatrix::from_matrix(&m)).unwrap();
        let part = Bipartition::first_m(1, 2).unwrap();
        let nu = pt_min_symplectic(&cm, &part).unwrap();
        assert!((nu - (-2.0 * r).exp()).abs() < 1e-10, "nu = {nu}");
        let en = log_negativity(&cm, &part).unwrap();
        assert!((en - 2.0 * r * std::f64::consts::LOG2_E).abs() < 1e-9);
    }

    #[test]
    fn sum_form_counts_every_negative_eigenvalue() {
        // Two uncorrelated two-mode squeezed pairs across the 2:2 split of
        // modes (0, 2) vs (1, 3): both PT eigenvalues drop below one.
        let r: f64 = 0.5;
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let mut m = Matrix::zeros(8, 8);
        for pair in [(0usize, 1usize), (2, 3)] {
            let (a, b) = pair;
            for (qa, qb, sign) in [(2 * a, 2 * b, 1.0), (2 * a + 1, 2 * b + 1, -1.0)] {
                m.set(qa, qa, ch);
                m.set(qb, qb, ch);
                m.set(qa, qb, sign * sh);
                m.set(qb, qa, sign * sh);
            }
        }
        let cm = CovarianceMatrix::new(SymMatrix::from_matrix(&m)).unwrap();
        let part = Bipartition::new(&[0, 2], 4).unwrap();
        let rep = log_negativity_report(&cm, &part, NegativityForm::Sum).unwrap();
        assert_eq!(rep.n_below_one, 2);
        assert!(!rep.consistency_warning);
        let single = log_negativity_report(&cm, &part, NegativityForm::MinEigenvalue).unwrap();
        assert!(single.consistency_warning);
        assert!((rep.en - 2.0 * single.en).abs() < 1e-9);
    }
}
