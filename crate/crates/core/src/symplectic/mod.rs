//! Phase-space kinematics for N-mode Gaussian states.
//!
//! Mode ordering is (q1, p1, ..., qN, pN) throughout; the vacuum covariance
//! matrix is the identity. A covariance matrix is physical when
//! `sigma + i Omega >= 0`, equivalently when every symplectic eigenvalue is
//! at least one.

mod inequalities;
mod random;
mod spectrum;

pub use inequalities::{poincare_check, sympb_check, PoincareReport, SympbReport};
pub use random::{random_cm, random_symplectic};
pub use spectrum::{
    log_negativity, log_negativity_report, pt_min_symplectic, pt_symplectic_spectrum,
    symplectic_spectrum, NegativityForm, NegativityReport,
};

use crate::error::{Error, Result};
use crate::linalg::{min_eig_sym, sym_eig, Matrix, SymMatrix};
use crate::tol::TOL_PSD;

/// The antisymmetric form encoding the canonical commutators.
#[derive(Clone, Debug)]
pub struct SymplecticForm {
    n_modes: usize,
    m: Matrix,
}

impl SymplecticForm {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }
}

/// Symplectic form for `n_modes` modes: a direct sum of [[0, 1], [-1, 0]] blocks.
pub fn omega(n_modes: usize) -> SymplecticForm {
    assert!(n_modes >= 1, "need at least one mode");
    let mut m = Matrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        m.set(2 * k, 2 * k + 1, 1.0);
        m.set(2 * k + 1, 2 * k, -1.0);
    }
    SymplecticForm { n_modes, m }
}

/// Vector of first moments of the quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanVector {
    values: Vec<f64>,
}

impl MeanVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "mean vector length must be positive and even, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { values })
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self {
            values: vec![0.0; 2 * n_modes],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_modes(&self) -> usize {
        self.values.len() / 2
    }
}

/// Matrix of second moments of an N-mode Gaussian state (vacuum = identity).
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    sigma: SymMatrix,
}

impl CovarianceMatrix {
    pub fn new(sigma: SymMatrix) -> Result<Self> {
        let dim = sigma.dim();
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix dimension must be even, got {dim}"
            )));
        }
        sigma.validate_finite()?;
        Ok(Self {
            n_modes: dim / 2,
            sigma,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            sigma: SymMatrix::identity(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    pub fn matrix(&self) -> &Matrix {
        self.sigma.matrix()
    }
}

/// A split of the N modes into two non-empty parties.
#[derive(Clone, Debug, PartialEq)]
pub struct Bipartition {
    n_modes: usize,
    party_a: Vec<usize>,
    party_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(party_a: &[usize], n_modes: usize) -> Result<Self> {
        let mut a: Vec<usize> = party_a.to_vec();
        a.sort_unstable();
        a.dedup();
        if a.len() != party_a.len() {
            return Err(Error::InvalidBipartition("duplicate mode indices".into()));
        }
        if a.is_empty() || a.len() >= n_modes {
            return Err(Error::InvalidBipartition(format!(
                "party A must contain between 1 and {} modes, got {}",
                n_modes.saturating_sub(1),
                a.len()
            )));
        }
        if let Some(&bad) = a.iter().find(|&&i| i >= n_modes) {
            return Err(Error::InvalidBipartition(format!(
                "mode index {bad} out of range for {n_modes} modes"
            )));
        }
        let party_b: Vec<usize> = (0..n_modes).filter(|i| !a.contains(i)).collect();
        Ok(Self {
            n_modes,
            party_a: a,
            party_b,
        })
    }

    /// First `m` modes versus the remaining `n_modes - m`.
    pub fn first_m(m: usize, n_modes: usize) -> Result<Self> {
        let a: Vec<usize> = (0..m).collect();
        Self::new(&a, n_modes)
    }

    /// Parse an `"m:n"` size split.
    pub fn parse_sizes(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::InvalidBipartition(format!(
                "expected m:n, got {text:?}"
            )));
        }
        let m: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidBipartition(format!("bad party size {:?}", parts[0])))?;
        let n: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidBipartition(format!("bad party size {:?}", parts[1])))?;
        if m == 0 || n == 0 {
            return Err(Error::InvalidBipartition(
                "both parties must be non-empty".into(),
            ));
        }
        Self::first_m(m, m + n)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn party_a(&self) -> &[usize] {
        &self.party_a
    }

    pub fn party_b(&self) -> &[usize] {
        &self.party_b
    }

    /// Size of party A.
    pub fn m(&self) -> usize {
        self.party_a.len()
    }

    /// Size of party B.
    pub fn n(&self) -> usize {
        self.party_b.len()
    }
}

/// Diagonal reflection implementing partial transposition: +1 everywhere
/// except -1 on the p rows of party-B modes. `sigma_pt = P sigma P` and the
/// partially transposed form is `P Omega P`.
pub fn pt_flip(part: &Bipartition) -> Matrix {
    let mut p = Matrix::identity(2 * part.n_modes());
    for &mode in part.party_b() {
        p.set(2 * mode + 1, 2 * mode + 1, -1.0);
    }
    p
}

/// Partially transposed covariance matrix `P sigma P`.
pub fn partial_transpose(cm: &CovarianceMatrix, part: &Bipartition) -> Result<CovarianceMatrix> {
    if part.n_modes() != cm.n_modes() {
        return Err(Error::InvalidBipartition(format!(
            "bipartition is over {} modes but state has {}",
            part.n_modes(),
            cm.n_modes()
        )));
    }
    let p = pt_flip(part);
    let st = &(&p * cm.matrix()) * &p;
    CovarianceMatrix::new(SymMatrix::from_matrix(&st))
}

/// Outcome of the physicality test `sigma + i Omega >= 0`.
#[derive(Clone, Debug)]
pub struct PhysicalityReport {
    pub physical: bool,
    /// Smallest eigenvalue of the real embedding [[sigma, -Omega], [Omega, sigma]].
    pub min_embedding_eig: f64,
    /// Smallest symplectic eigenvalue, when sigma is positive definite.
    pub min_symplectic_eig: Option<f64>,
}

/// Test `sigma + i Omega >= 0` through its 4N x 4N real embedding.
///
/// The report also carries the minimum symplectic eigenvalue (when defined)
/// so the two equivalent physicality tests can be cross-checked.
pub fn check_physical(cm: &CovarianceMatrix, tol: f64) -> Result<PhysicalityReport> {
    let n = cm.n_modes();
    let d = 2 * n;
    let w = omega(n);
    let emb = Matrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
        (true, true) => cm.matrix().get(i, j),
        (true, false) => -w.matrix().get(i, j - d),
        (false, true) => w.matrix().get(i - d, j),
        (false, false) => cm.matrix().get(i - d, j - d),
    });
    let min_embedding_eig = min_eig_sym(&SymMatrix::from_matrix(&emb))?;
    let min_symplectic_eig = if min_eig_sym(cm.sigma())? > TOL_PSD {
        Some(symplectic_spectrum(cm)?[0])
    } else {
        None
    };
    Ok(PhysicalityReport {
        physical: min_embedding_eig >= -tol,
        min_embedding_eig,
        min_symplectic_eig,
    })
}

pub(crate) fn sym_eig_values(s: &SymMatrix) -> Result<Vec<f64>> {
    Ok(sym_eig(s)?.values)
}
