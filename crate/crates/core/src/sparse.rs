//! General CSR matrices and the sparse x dense product that dominates the
//! embedding cost.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and every stored
/// value is finite. Construction goes through [`SparseMatrix::try_new`] or
/// [`SparseMatrix::from_triplets`], which check this.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn try_new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_csr(n_rows, n_cols, &row_ptr, &col_idx)?;
        if values.len() != col_idx.len() {
            return Err(Error::domain("CSR values and col_idx lengths differ"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::numeric(alloc::format!(
                "non-finite CSR value at position {pos}"
            )));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Skips validation. Callers guarantee the CSR invariants.
    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert!(check_csr(n_rows, n_cols, &row_ptr, &col_idx).is_ok());
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if n_cols > u32::MAX as usize {
            return Err(Error::domain("column count exceeds u32 index range"));
        }
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, _) in &t {
            if r >= n_rows || c >= n_cols {
                return Err(Error::domain(alloc::format!(
                    "triplet ({r},{c}) outside {n_rows}x{n_cols}"
                )));
            }
        }
        t.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c as u32);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::try_new(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, alpha: f64) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
            values: vec![alpha; n],
        }
    }

    /// Stores every entry of a dense matrix, zeros included.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let (r, c) = m.shape();
        SparseMatrix {
            n_rows: r,
            n_cols: c,
            row_ptr: (0..=r).map(|i| i * c).collect(),
            col_idx: (0..r).flat_map(|_| 0..c as u32).collect(),
            values: m.as_slice().to_vec(),
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Value at `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Iterates stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j as usize, x))
        })
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            d.set(i, j, v);
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c as usize + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows are visited in order, so each output row comes out sorted.
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c as usize];
                col_idx[slot] = i as u32;
                values[slot] = v;
                next[c as usize] += 1;
            }
        }
        SparseMatrix::from_parts_unchecked(self.n_cols, self.n_rows, row_ptr, col_idx, values)
    }

    /// Keeps the entries for which `keep(row, col, value)` is true.
    pub fn filter_entries(&self, mut keep: impl FnMut(usize, usize, f64) -> bool) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                if keep(i, c as usize, v) {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix::from_parts_unchecked(self.n_rows, self.n_cols, row_ptr, col_idx, values)
    }

    /// Same sparsity pattern, values mapped through `f(row, col, value)`.
    pub(crate) fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> SparseMatrix {
        let mut values = Vec::with_capacity(self.nnz());
        for (i, j, v) in self.iter() {
            values.push(f(i, j, v));
        }
        SparseMatrix {
            values,
            ..self.clone()
        }
    }

    /// `self * x` for a dense `x`.
    pub fn mul_dense(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = DenseMatrix::zeros(self.n_rows, x.cols());
        self.mul_dense_into(x, &mut out)?;
        Ok(out)
    }

    /// `out = self * x`. Each output row is a gather over one CSR row, so the
    /// summation order per entry is fixed whether or not rows run in parallel.
    pub fn mul_dense_into(&self, x: &DenseMatrix, out: &mut DenseMatrix) -> Result<()> {
        if x.rows() != self.n_cols {
            return Err(Error::dims(
                "sparse * dense",
                (self.n_cols, x.cols()),
                x.shape(),
            ));
        }
        if out.shape() != (self.n_rows, x.cols()) {
            return Err(Error::dims(
                "sparse * dense output",
                (self.n_rows, x.cols()),
                out.shape(),
            ));
        }
        let w = x.cols();
        if w == 0 || self.n_rows == 0 {
            return Ok(());
        }
        let xs = x.as_slice();
        let kernel = |i: usize, dst: &mut [f64]| {
            dst.iter_mut().for_each(|v| *v = 0.0);
            let (cols, vals) = self.row(i);
            for (&c, &a) in cols.iter().zip(vals) {
                let src = &xs[c as usize * w..(c as usize + 1) * w];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if self.nnz() * w >= PARALLEL_WORK_THRESHOLD {
                out.as_mut_slice()
                    .par_chunks_mut(w)
                    .enumerate()
                    .for_each(|(i, dst)| kernel(i, dst));
                return Ok(());
            }
        }
        for (i, dst) in out.as_mut_slice().chunks_mut(w).enumerate() {
            kernel(i, dst);
        }
        Ok(())
    }
}

#[cfg(feature = "parallel")]
const PARALLEL_WORK_THRESHOLD: usize = 1 << 16;

fn check_csr(n_rows: usize, n_cols: usize, row_ptr: &[usize], col_idx: &[u32]) -> Result<()> {
    if row_ptr.len() != n_rows + 1 {
        return Err(Error::domain(alloc::format!(
            "row_ptr has length {}, expected {}",
            row_ptr.len(),
            n_rows + 1
        )));
    }
    if row_ptr[0] != 0 || row_ptr[n_rows] != col_idx.len() {
        return Err(Error::domain(
            "row_ptr endpoints do not match stored entries",
        ));
    }
    for i in 0..n_rows {
        let (s, e) = (row_ptr[i], row_ptr[i + 1]);
        if s > e {
            return Err(Error::domain(alloc::format!(
                "row_ptr decreases at row {i}"
            )));
        }
        let row = &col_idx[s..e];
        if row.iter().any(|&c| c as usize >= n_cols) {
            return Err(Error::domain(alloc::format!(
                "column out of range in row {i}"
            )));
        }
        if row.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(alloc::format!(
                "row {i} columns not strictly increasing"
            )));
        }
    }
    Ok(())
}
