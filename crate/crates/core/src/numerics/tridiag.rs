//! Symmetric tridiagonal eigen-solver (implicit QL with Wilkinson shifts).
//!
//! The rotations act independently on each row of the eigenvector matrix,
//! so callers that only need a few rows (the Green's-function sums need the
//! row of the full-buffer state) can track just those in O(n) per sweep.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// Sub/super-diagonal, length `diag.len() - 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(invalid(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Tracked matrix rows.
    pub rows: Vec<usize>,
    /// `components[r][k]` is entry `rows[r]` of the k-th unit eigenvector.
    pub components: Vec<Vec<f64>>,
}

impl TridiagEigen {
    /// Eigenvector k as a dense vector; only meaningful when every row was tracked.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.components.len()];
        for (r, &row) in self.rows.iter().enumerate() {
            v[row] = self.components[r][k];
        }
        v
    }

    pub fn component(&self, row: usize, k: usize) -> Option<f64> {
        self.rows
            .iter()
            .position(|&r| r == row)
            .map(|r| self.components[r][k])
    }
}

/// Full eigen-decomposition.
pub fn tridiag_eigen(m: &SymTridiagonal) -> Result<TridiagEigen> {
    let rows: Vec<usize> = (0..m.len()).collect();
    tridiag_eigen_rows(m, &rows)
}

/// Eigenvalues plus the selected rows of the eigenvector matrix.
pub fn tridiag_eigen_rows(m: &SymTridiagonal, rows: &[usize]) -> Result<TridiagEigen> {
    let n = m.len();
    if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
        return Err(invalid(format!("row {bad} out of range for size {n}")));
    }
    let mut d = m.diag.clone();
    let mut e = m.off.clone();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let mut v = vec![0.0; n];
            v[r] = 1.0;
            v
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zr in z.iter_mut() {
                    let f = zr[i + 1];
                    zr[i + 1] = s * zr[i] + c * f;
                    zr[i] = c * zr[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values = order.iter().map(|&k| d[k]).collect();
    let components = z
        .into_iter()
        .map(|zr| order.iter().map(|&k| zr[k]).collect())
        .collect();
    Ok(TridiagEigen {
        values,
        rows: rows.to_vec(),
        components,
    })
}
