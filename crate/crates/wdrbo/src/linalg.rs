//! Dense symmetric linear algebra: just enough for kernel ridge regression.
//!
//! Matrices here are small (hundreds of rows at most), so a straightforward
//! row-major `Vec<f64>` layout beats pulling in a full linear algebra stack.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.data[i * n_cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .sum()
    }
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A` for a symmetric
/// positive-definite `A`. Stored packed by rows: row `i` holds `i + 1` entries.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    rows: Vec<f64>,
}

impl CholeskyFactor {
    /// Factor of the 0x0 matrix; the seed for incremental row appends.
    pub fn empty() -> Self {
        CholeskyFactor {
            n: 0,
            rows: Vec::new(),
        }
    }

    /// Factor `a + extra_diag * I`. Fails with the offending pivot when the
    /// shifted matrix is not numerically positive definite.
    pub fn factor(a: &Matrix, extra_diag: f64) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::input("cholesky requires a square matrix"));
        }
        let mut chol = CholeskyFactor::empty();
        chol.rows.reserve(n * (n + 1) / 2);
        for i in 0..n {
            let row: Vec<f64> = (0..=i).map(|j| a.get(i, j)).collect();
            let mut diag = row[i] + extra_diag;
            let cross = &row[..i];
            chol.push_row(cross, &mut diag)?;
        }
        Ok(chol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.rows[start..start + i + 1]
    }

    /// Diagonal entries of `L`.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i)[i]).collect()
    }

    /// `sum_i 2 ln L_ii = ln det(A)`.
    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| 2.0 * self.row(i)[i].ln()).sum()
    }

    /// Extend the factor by one row: `cross` holds the new off-diagonal column
    /// of `A` (length `n`), `diag` the new diagonal entry. O(n^2).
    pub fn append_row(&mut self, cross: &[f64], diag: f64) -> Result<()> {
        if cross.len() != self.n {
            return Err(Error::input(format!(
                "append_row expects {} cross terms, got {}",
                self.n,
                cross.len()
            )));
        }
        let mut d = diag;
        self.push_row(cross, &mut d)
    }

    fn push_row(&mut self, cross: &[f64], diag: &mut f64) -> Result<()> {
        let i = self.n;
        let mut new_row = Vec::with_capacity(i + 1);
        for j in 0..i {
            let lj = self.row(j);
            let mut s = cross[j];
            for k in 0..j {
                s -= new_row[k] * lj[k];
            }
            new_row.push(s / lj[j]);
        }
        let pivot = *diag - new_row.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::numerical(format!(
                "cholesky pivot {pivot:.3e} at row {i} is not positive"
            )));
        }
        new_row.push(pivot.sqrt());
        self.rows.extend_from_slice(&new_row);
        self.n += 1;
        Ok(())
    }

    /// Solve `L w = b` in place of a fresh vector.
    pub fn forward_solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let mut w = vec![0.0; self.n];
        for i in 0..self.n {
            let li = self.row(i);
            let mut s = b[i];
            for k in 0..i {
                s -= li[k] * w[k];
            }
            w[i] = s / li[i];
        }
        w
    }

    /// Solve `L^T v = w`.
    pub fn backward_solve(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.n);
        let mut v = w.to_vec();
        for i in (0..self.n).rev() {
            let li = self.row(i);
            v[i] /= li[i];
            for k in 0..i {
                v[k] -= li[k] * v[i];
            }
        }
        v
    }

    /// Solve `A v = b` where `A = L L^T`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward_solve(&self.forward_solve(b))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
