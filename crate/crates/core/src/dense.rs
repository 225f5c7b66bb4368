//! Dense row-major matrices.
//!
//! The same type holds node embeddings (`n x k`), random sketches, orthonormal
//! bases and the small Gram matrices produced while projecting blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Dense `rows x cols` matrix of `f64`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Node representations: row `i` is the embedding of node `i`.
pub type EmbeddingMatrix = DenseMatrix;

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "DenseMatrix::from_vec",
                expected: alloc::format!("{} values", rows * cols),
                found: alloc::format!("{} values", data.len()),
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::domain("ragged rows"));
            }
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> DenseMatrix {
        assert!(start <= end && end <= self.cols);
        DenseMatrix::from_fn(self.rows, end - start, |i, j| self.get(i, start + j))
    }

    /// Writes `block` into columns starting at `start`.
    pub fn set_columns(&mut self, start: usize, block: &DenseMatrix) {
        assert_eq!(block.rows, self.rows);
        assert!(start + block.cols <= self.cols);
        let w = block.cols;
        for i in 0..self.rows {
            let off = i * self.cols + start;
            self.data[off..off + w].copy_from_slice(block.row(i));
        }
    }

    /// Horizontal concatenation `[a_1 a_2 ...]`.
    pub fn hconcat(blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::domain("hconcat: blocks have different row counts"));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = DenseMatrix::zeros(rows, cols);
        let mut start = 0;
        for b in blocks {
            out.set_columns(start, b);
            start += b.cols;
        }
        Ok(out)
    }

    /// `self * other`. Naive triple loop in i-k-j order.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(
                "matmul",
                (self.cols, other.cols),
                (other.rows, other.cols),
            ));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    math::axpy(a, other.row(l), out_row);
                }
            }
        }
        Ok(out)
    }

    /// `self^T * other`, accumulated row by row so both operands stream once.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(Error::dims(
                "t_matmul",
                (self.rows, other.cols),
                (other.rows, other.cols),
            ));
        }
        let (ka, kb) = (self.cols, other.cols);
        let mut out = DenseMatrix::zeros(ka, kb);
        for r in 0..self.rows {
            let b = other.row(r);
            for (a_idx, &a) in self.row(r).iter().enumerate() {
                if a != 0.0 {
                    math::axpy(a, b, &mut out.data[a_idx * kb..(a_idx + 1) * kb]);
                }
            }
        }
        Ok(out)
    }

    /// `self -= basis * coeffs`.
    pub(crate) fn sub_matmul(&mut self, basis: &DenseMatrix, coeffs: &DenseMatrix) {
        debug_assert_eq!(basis.rows, self.rows);
        debug_assert_eq!(basis.cols, coeffs.rows);
        debug_assert_eq!(coeffs.cols, self.cols);
        let w = self.cols;
        for r in 0..self.rows {
            let dst = &mut self.data[r * w..(r + 1) * w];
            for (a_idx, &a) in basis.row(r).iter().enumerate() {
                if a != 0.0 {
                    math::axpy(-a, coeffs.row(a_idx), dst);
                }
            }
        }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dims("add_scaled", self.shape(), other.shape()));
        }
        math::axpy(alpha, &other.data, &mut self.data);
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm2(&self.data)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self^T self - I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.t_matmul(self).expect("square gram");
        let mut worst: f64 = 0.0;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - target).abs());
            }
        }
        worst
    }

    /// Scales every nonzero row to unit Euclidean norm.
    pub fn normalize_rows(&mut self) {
        let c = self.cols;
        for row in self.data.chunks_mut(c.max(1)) {
            let norm = math::norm2(row);
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_matmul_matches_transpose_then_matmul() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| (i * 3 + j) as f64 - 4.0);
        let b = DenseMatrix::from_fn(5, 2, |i, j| (i as f64) * 0.5 - j as f64);
        let direct = a.t_matmul(&b).unwrap();
        let via = a.transpose().matmul(&b).unwrap();
        assert!(direct.max_abs_diff(&via) < 1e-14);
    }

    #[test]
    fn sub_matmul_projects() {
        let mut y = DenseMatrix::from_fn(4, 2, |i, j| (i + j) as f64);
        let basis = DenseMatrix::from_fn(4, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let coeffs = basis.t_matmul(&y).unwrap();
        y.sub_matmul(&basis, &coeffs);
        assert_eq!(y.row(0), &[0.0, 0.0]);
        assert_eq!(y.row(3), &[3.0, 4.0]);
    }

    #[test]
    fn hconcat_and_columns_roundtrip() {
        let a = DenseMatrix::from_fn(3, 2, |i, j| (i * 10 + j) as f64);
        let b = DenseMatrix::from_fn(3, 1, |i, _| -(i as f64));
        let ab = DenseMatrix::hconcat(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(ab.columns(0, 2), a);
        assert_eq!(ab.columns(2, 3), b);
    }

    #[test]
    fn from_vec_rejects_wrong_length() {
        assert!(DenseMatrix::from_vec(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn normalize_rows_skips_zero_rows() {
        let mut m = DenseMatrix::from_vec(2, 2, vec![3.0, 4.0, 0.0, 0.0]).unwrap();
        m.normalize_rows();
        assert_eq!(m.row(0), &[0.6, 0.8]);
        assert_eq!(m.row(1), &[0.0, 0.0]);
    }
}
