//! Matrix functions: PSD square root and the exponential.

use crate::error::{Error, Result};
use crate::linalg::eigen::sym_eig;
use crate::linalg::{Matrix, SymMatrix};
use crate::tol::TOL_PSD;

/// Principal square root of a positive-semidefinite symmetric matrix.
///
/// Eigenvalues in `[-tol, 0)` are treated as rounding noise and clamped to
/// zero; anything below `-tol` is a hard [`Error::NotPsd`].
pub fn sqrtm_psd(s: &SymMatrix) -> Result<SymMatrix> {
    sqrtm_psd_tol(s, TOL_PSD)
}

/// [`sqrtm_psd`] with an explicit clamping tolerance.
pub fn sqrtm_psd_tol(s: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    let e = sym_eig(s)?;
    if e.values[0] < -tol {
        return Err(Error::NotPsd {
            min_eig: e.values[0],
            tol,
        });
    }
    let roots: Vec<f64> = e.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let r = &(&e.vectors * &Matrix::diag(&roots)) * &e.vectors.t();
    Ok(SymMatrix::from_matrix(&r))
}

/// Matrix exponential by scaling and squaring with a truncated series.
pub fn expm(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    m.validate_finite()?;
    let n = m.rows();

    // Scale until the argument norm is small enough for fast series decay.
    let norm = m.max_abs() * n as f64;
    let mut squarings = 0u32;
    let mut scaled = norm;
    while scaled > 0.25 {
        scaled /= 2.0;
        squarings += 1;
    }
    let b = m.scale(0.5f64.powi(squarings as i32));

    let mut acc = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=40 {
        term = (&term * &b).scale(1.0 / k as f64);
        acc = &acc + &term;
        if term.max_abs() <= 1e-16 * acc.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}
