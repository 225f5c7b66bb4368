use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::math;

/// A column whose norm falls below this fraction of its reference norm is
/// treated as linearly dependent on the columns already accepted.
pub(crate) const DEGENERACY_TOL: f64 = 1e-12;

/// Orthonormalizes the columns of `y` in place with modified Gram-Schmidt,
/// reorthogonalizing each column once.
///
/// `reference[j]` is the norm the column is measured against when deciding
/// degeneracy; it defaults to the column's own norm on entry. Degenerate
/// columns are zeroed and their indices returned.
pub(crate) fn orthonormalize_columns(y: &mut DenseMatrix, reference: Option<&[f64]>) -> Vec<usize> {
    let (n, w) = y.shape();
    // Column-major scratch: column j is cols[j*n..(j+1)*n].
    let mut cols = alloc::vec![0.0; n * w];
    for i in 0..n {
        for (j, &v) in y.row(i).iter().enumerate() {
            cols[j * n + i] = v;
        }
    }

    let mut accepted: Vec<usize> = Vec::with_capacity(w);
    let mut degenerate = Vec::new();
    for j in 0..w {
        let (done, rest) = cols.split_at_mut(j * n);
        let v = &mut rest[..n];
        let start_norm = math::norm2(v);
        let reference = reference.map_or(start_norm, |r| r[j]);
        for _ in 0..2 {
            for &l in &accepted {
                let ql = &done[l * n..(l + 1) * n];
                let h = math::dot(ql, v);
                math::axpy(-h, ql, v);
            }
        }
        let norm = math::norm2(v);
        if !(reference > 0.0) || !(norm > DEGENERACY_TOL * reference) || !norm.is_finite() {
            v.iter_mut().for_each(|x| *x = 0.0);
            degenerate.push(j);
        } else {
            v.iter_mut().for_each(|x| *x /= norm);
            accepted.push(j);
        }
    }

    for i in 0..n {
        let row = y.row_mut(i);
        for (j, dst) in row.iter_mut().enumerate() {
            *dst = cols[j * n + i];
        }
    }
    degenerate
}

/// Classical block Gram-Schmidt step: `y -= sum_j P_j (P_j^T y)`, with every
/// coefficient block computed from the same `y`.
pub(crate) fn project_out(y: &mut DenseMatrix, prev: &[DenseMatrix]) {
    let coeffs: Vec<DenseMatrix> = prev
        .iter()
        .map(|p| p.t_matmul(y).expect("block rows agree"))
        .collect();
    for (p, g) in prev.iter().zip(&coeffs) {
        y.sub_matmul(p, g);
    }
}

pub(crate) fn column_norms(y: &DenseMatrix) -> Vec<f64> {
    let mut sq = alloc::vec![0.0; y.cols()];
    for i in 0..y.rows() {
        for (s, v) in sq.iter_mut().zip(y.row(i)) {
            *s += v * v;
        }
    }
    sq.into_iter().map(math::sqrt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dependent_column_is_flagged() {
        let mut y = DenseMatrix::from_fn(4, 3, |i, j| match j {
            0 => i as f64 + 1.0,
            1 => 2.0 * (i as f64 + 1.0),
            _ => {
                if i == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        });
        let deg = orthonormalize_columns(&mut y, None);
        assert_eq!(deg, vec![1]);
        assert_eq!(y.column(1), vec![0.0; 4]);
        let kept = DenseMatrix::hconcat(&[y.columns(0, 1), y.columns(2, 3)]).unwrap();
        assert!(kept.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn zero_column_is_flagged() {
        let mut y = DenseMatrix::zeros(3, 1);
        assert_eq!(orthonormalize_columns(&mut y, None), vec![0]);
    }
}
