use alloc::format;
use alloc::vec::Vec;

use crate::error::{contract, Result};

/// Dense real matrix with finite entries, addressed by `(row, col)`.
///
/// Storage is column-major, so [`DenseMatrix::col`] is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(contract(format!("matrix must be non-empty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(contract(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(contract(format!(
                "non-finite entry at ({}, {})",
                pos % rows,
                pos / rows
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices, which is how small literals read best.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if let Some(r) = rows.iter().position(|r| r.len() != ncols) {
            return Err(contract(format!("row {r} has length {}, expected {ncols}", rows[r].len())));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for c in 0..ncols {
            data.extend(rows.iter().map(|r| r[c]));
        }
        Self::from_col_major(nrows, ncols, data)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[&[f64]]) -> Result<Self> {
        let nrows = cols.first().map_or(0, |c| c.len());
        if let Some(c) = cols.iter().position(|c| c.len() != nrows) {
            return Err(contract(format!("column {c} has length {}, expected {nrows}", cols[c].len())));
        }
        Self::from_col_major(nrows, cols.len(), cols.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self::from_col_major(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_col_major(rows, cols, alloc::vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    /// Skips validation; callers guarantee shape and finiteness.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(row, col)`. Panics when out of bounds, like slice indexing.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.rows {
            data.extend(self.columns().map(|col| col[r]));
        }
        Self::from_raw(self.cols, self.rows, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(crate::sq_norm(&self.data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `self · v` for a vector of length `cols`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(contract(format!(
                "vector of length {} cannot multiply a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = alloc::vec![0.0; self.rows];
        for (col, &s) in self.columns().zip(v) {
            for (o, a) in out.iter_mut().zip(col) {
                *o += a * s;
            }
        }
        Ok(out)
    }

    /// `selfᵀ · v` for a vector of length `rows`, one dot product per column.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(contract(format!(
                "vector of length {} cannot multiply the transpose of a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(self.columns().map(|col| crate::dot(col, v)).collect())
    }

    /// `self · selfᵀ`, exactly symmetric.
    pub fn outer_gram(&self) -> Self {
        let m = self.rows;
        let mut out = alloc::vec![0.0; m * m];
        for col in self.columns() {
            for c in 0..m {
                let s = col[c];
                if s == 0.0 {
                    continue;
                }
                for r in 0..=c {
                    out[c * m + r] += col[r] * s;
                }
            }
        }
        for c in 0..m {
            for r in c + 1..m {
                out[c * m + r] = out[r * m + c];
            }
        }
        Self::from_raw(m, m, out)
    }
}

/// Standard matrix product `a · b`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(contract(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut data = alloc::vec![0.0; a.rows * b.cols];
    for (out, bcol) in data.chunks_exact_mut(a.rows).zip(b.columns()) {
        for (acol, &s) in a.columns().zip(bcol) {
            for (o, x) in out.iter_mut().zip(acol) {
                *o += x * s;
            }
        }
    }
    Ok(DenseMatrix::from_raw(a.rows, b.cols, data))
}
