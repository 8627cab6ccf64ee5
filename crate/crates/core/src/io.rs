//! File formats: the shared matrix JSON schema and sweep CSV emission.
//!
//! Every 2N x 2N matrix (covariance, drift, Hamiltonian, unravelling) is
//! exchanged as
//!
//! ```json
//! {"n_modes": 2, "ordering": "qpqp", "data": [ ... 16 row-major reals ... ]}
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::DriftMatrix;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::parametric::SweepRow;
use crate::symplectic::CovarianceMatrix;

pub const MATRIX_ORDERING: &str = "qpqp";

/// On-disk representation of a phase-space matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n_modes: usize,
    pub ordering: String,
    pub data: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix, n_modes: usize) -> Result<Self> {
        if m.rows() != 2 * n_modes || m.cols() != 2 * n_modes {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0} matrix for {1} modes", 2 * n_modes, n_modes),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        Ok(Self {
            n_modes,
            ordering: MATRIX_ORDERING.into(),
            data: m.data().to_vec(),
        })
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be positive".into()));
        }
        if self.ordering != MATRIX_ORDERING {
            return Err(Error::InvalidArgument(format!(
                "unsupported ordering {:?}, expected {MATRIX_ORDERING:?}",
                self.ordering
            )));
        }
        let d = 2 * self.n_modes;
        if self.data.len() != d * d {
            return Err(Error::InvalidArgument(format!(
                "data has {} entries, expected {}",
                self.data.len(),
                d * d
            )));
        }
        let m = Matrix::from_fn(d, d, |i, j| self.data[i * d + j]);
        m.validate_finite()?;
        Ok(m)
    }
}

/// Write a matrix to `path` in the shared JSON schema.
pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix, n_modes: usize) -> Result<()> {
    let doc = MatrixJson::from_matrix(m, n_modes)?;
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Load a matrix and its mode count from the shared JSON schema.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<(Matrix, usize)> {
    let text = fs::read_to_string(path)?;
    let doc: MatrixJson = serde_json::from_str(&text)?;
    Ok((doc.to_matrix()?, doc.n_modes))
}

/// Load a covariance matrix (symmetrized on construction).
pub fn load_cm(path: impl AsRef<Path>) -> Result<CovarianceMatrix> {
    let (m, _) = load_matrix(path)?;
    CovarianceMatrix::new(SymMatrix::from_matrix(&m))
}

/// Load a drift matrix.
pub fn load_drift(path: impl AsRef<Path>) -> Result<DriftMatrix> {
    let (m, _) = load_matrix(path)?;
    DriftMatrix::from_matrix(m)
}

/// Render a float with 12 significant digits; stable across runs.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

fn format_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format_g12(v),
        None => "nan".into(),
    }
}

pub const SWEEP_CSV_HEADER: &str = "chi,nu_free,nu_local,nu_bound,mu1_star,status";

/// Emit sweep rows as CSV with the fixed header and 12-significant-digit
/// floats, one row per grid point in grid order.
pub fn write_sweep_csv(mut w: impl Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            format_g12(row.chi),
            format_opt(row.nu_free),
            format_opt(row.nu_local),
            format_opt(row.nu_bound),
            format_opt(row.mu1_star),
            csv_field(&row.status),
        )?;
    }
    Ok(())
}

/// Emit rows for several bipartitions into one file with a leading
/// `bipartition` column.
pub fn write_combined_csv(mut w: impl Write, groups: &[(String, Vec<SweepRow>)]) -> Result<()> {
    writeln!(w, "bipartition,{SWEEP_CSV_HEADER}")?;
    for (label, rows) in groups {
        for row in rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                csv_field(label),
                format_g12(row.chi),
                format_opt(row.nu_free),
                format_opt(row.nu_local),
                format_opt(row.nu_bound),
                format_opt(row.mu1_star),
                csv_field(&row.status),
            )?;
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let m = Matrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64 / 7.0);
        save_matrix(&path, &m, 2).unwrap();
        let (back, n_modes) = load_matrix(&path).unwrap();
        assert_eq!(n_modes, 2);
        assert_eq!(&back, &m);
    }

    #[test]
    fn schema_violations_are_reported() {
        let bad = MatrixJson {
            n_modes: 2,
            ordering: "qqpp".into(),
            data: vec![0.0; 16],
        };
        assert!(matches!(bad.to_matrix(), Err(Error::InvalidArgument(_))));
        let bad = MatrixJson {
            n_modes: 2,
            ordering: "qpqp".into(),
            data: vec![0.0; 15],
        };
        assert!(matches!(bad.to_matrix(), Err(Error::InvalidArgument(_))));
        let bad = MatrixJson {
            n_modes: 1,
            ordering: "qpqp".into(),
            data: vec![0.0, f64::NAN, 0.0, 0.0],
        };
        assert!(matches!(bad.to_matrix(), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_g12(0.45), "4.50000000000e-1");
        assert_eq!(format_g12(f64::NAN), "nan");
    }

    #[test]
    fn csv_header_and_shape() {
        let rows = vec![SweepRow {
            chi: 0.0,
            nu_free: Some(1.0),
            nu_local: Some(1.0),
            nu_bound: Some(1.0),
            mu1_star: Some(0.0),
            status: "ok".into(),
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[5], "ok");
    }
}
