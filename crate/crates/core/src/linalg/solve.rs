//! Dense linear solves and the continuous-time Lyapunov equation.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::tol::TOL_RESID;

/// Solve `A X = B` by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} and {0}xk", a.rows()),
            got: format!("{}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        });
    }
    let n = a.rows();
    let k = b.cols();
    let mut lu: Vec<f64> = a.data().to_vec();
    let mut rhs: Vec<f64> = b.data().to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[col * n + col].abs();
        for r in col + 1..n {
            let v = lu[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= 1e-14 * scale {
            return Err(Error::Singular { pivot: pivot_val });
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            for j in 0..k {
                rhs.swap(col * k + j, pivot_row * k + j);
            }
        }
        let inv = 1.0 / lu[col * n + col];
        for r in col + 1..n {
            let factor = lu[r * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            lu[r * n + col] = 0.0;
            for j in col + 1..n {
                lu[r * n + j] -= factor * lu[col * n + j];
            }
            for j in 0..k {
                rhs[r * k + j] -= factor * rhs[col * k + j];
            }
        }
    }

    for col in (0..n).rev() {
        let inv = 1.0 / lu[col * n + col];
        for j in 0..k {
            let mut sum = rhs[col * k + j];
            for m in col + 1..n {
                sum -= lu[col * n + m] * rhs[m * k + j];
            }
            rhs[col * k + j] = sum * inv;
        }
    }

    Ok(Matrix::from_fn(n, k, |i, j| rhs[i * k + j]))
}

/// Inverse via LU against the identity.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Solve `A s + s A^T + Q = 0` for symmetric `s`.
///
/// The equation is vectorized through its Kronecker-sum structure and handed
/// to the dense LU solver; dimensions stay small enough that the O(d^6) cost
/// is irrelevant. A mirrored drift spectrum (lambda_i = -lambda_j) makes the
/// system singular and is reported as [`Error::SingularLyapunov`].
pub fn solve_lyapunov(a: &Matrix, q: &SymMatrix) -> Result<SymMatrix> {
    solve_lyapunov_tol(a, q, TOL_RESID)
}

/// [`solve_lyapunov`] with an explicit relative residual tolerance.
pub fn solve_lyapunov_tol(a: &Matrix, q: &SymMatrix, tol: f64) -> Result<SymMatrix> {
    if !a.is_square() || a.rows() != q.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} drift with {0}x{0} inhomogeneity", q.dim()),
            got: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let d = a.rows();
    // Row-major vec(X): (A (x) I + I (x) A) x = -vec(Q).
    let mut big = Matrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            for k in 0..d {
                let v = big.get(row, k * d + j) + a.get(i, k);
                big.set(row, k * d + j, v);
            }
            for l in 0..d {
                let v = big.get(row, i * d + l) + a.get(j, l);
                big.set(row, i * d + l, v);
            }
        }
    }
    let rhs = Matrix::from_fn(d * d, 1, |r, _| -q.get(r / d, r % d));
    let x = match solve(&big, &rhs) {
        Ok(x) => x,
        Err(Error::Singular { pivot }) => {
            return Err(Error::SingularLyapunov {
                residual: pivot,
                tol,
            })
        }
        Err(e) => return Err(e),
    };
    let s = SymMatrix::from_matrix(&Matrix::from_fn(d, d, |i, j| x.get(i * d + j, 0)));

    let residual = lyapunov_residual(a, &s, q);
    let threshold = tol * q.max_abs().max(f64::MIN_POSITIVE);
    if residual > threshold {
        return Err(Error::SingularLyapunov {
            residual,
            tol: threshold,
        });
    }
    Ok(s)
}

/// `max_abs(A s + s A^T + Q)`.
pub fn lyapunov_residual(a: &Matrix, s: &SymMatrix, q: &SymMatrix) -> f64 {
    let asm = a * s.matrix();
    (&(&asm + &asm.t()) + q.matrix()).max_abs()
}
