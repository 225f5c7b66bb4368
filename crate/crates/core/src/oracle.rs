//! Dense reference routines for validating the randomized path.
//!
//! Everything here is `O(n^3)` and meant for matrices of a few hundred rows:
//! an exact truncated SVD (one-sided Jacobi), the projection error
//! `||M - C C^T M||_F`, and the expected-error bound for Gaussian range
//! finders with oversampling.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::rangefinder::gaussian_block;
use crate::sparse::SparseMatrix;

/// Top-`k` singular triple `M ~ U diag(sigma) V^T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdTriple {
    pub u: DenseMatrix,
    /// Descending, non-negative.
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Thin SVD of a dense matrix by one-sided Jacobi rotations. Returns all
/// `min(rows, cols)` singular values, descending.
pub fn dense_svd(m: &DenseMatrix) -> Result<SvdTriple> {
    if !m.is_finite() {
        return Err(Error::numeric("SVD input has non-finite entries"));
    }
    if m.rows() < m.cols() {
        let t = dense_svd(&m.transpose())?;
        return Ok(SvdTriple {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (rows, cols) = m.shape();
    let mut u: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = math::dot(&u[p], &u[p]);
                let beta = math::dot(&u[q], &u[q]);
                let gamma = math::dot(&u[p], &u[q]);
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numeric("Jacobi SVD did not converge"));
    }

    let mut order: Vec<(f64, usize)> = u
        .iter()
        .enumerate()
        .map(|(j, c)| (math::norm2(c), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for &(s, j) in &order {
        if s > 0.0 {
            u_cols.push(u[j].iter().map(|x| x / s).collect());
        } else {
            u_cols.push(orthonormal_completion(&u_cols, rows));
        }
    }
    let v_cols: Vec<&Vec<f64>> = order.iter().map(|&(_, j)| &v[j]).collect();
    Ok(SvdTriple {
        u: DenseMatrix::from_fn(rows, cols, |i, j| u_cols[j][i]),
        sigma,
        v: DenseMatrix::from_fn(cols, cols, |i, j| v_cols[j][i]),
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (a, b) = (&mut left[p], &mut right[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// A unit vector orthogonal to `basis`, for singular vectors of zero
/// singular values.
fn orthonormal_completion(basis: &[Vec<f64>], n: usize) -> Vec<f64> {
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let h = math::dot(b, &v);
                math::axpy(-h, b, &mut v);
            }
        }
        let norm = math::norm2(&v);
        if norm > 0.5 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
    unreachable!("basis cannot span the whole space when a completion is requested")
}

/// Top-`k` truncated SVD.
pub fn dense_tsvd(m: &DenseMatrix, k: usize) -> Result<SvdTriple> {
    let min_dim = m.rows().min(m.cols());
    if k == 0 || k > min_dim {
        return Err(Error::domain(alloc::format!(
            "rank {k} outside 1..={min_dim}"
        )));
    }
    let full = dense_svd(m)?;
    Ok(SvdTriple {
        u: full.u.columns(0, k),
        sigma: full.sigma[..k].to_vec(),
        v: full.v.columns(0, k),
    })
}

/// Matrices whose rows can be materialized one at a time.
pub trait RowOperand {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// Writes row `i` into `buf` (`n_cols` long).
    fn dense_row(&self, i: usize, buf: &mut [f64]);
}

impl RowOperand for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.rows()
    }
    fn n_cols(&self) -> usize {
        self.cols()
    }
    fn dense_row(&self, i: usize, buf: &mut [f64]) {
        buf.copy_from_slice(self.row(i));
    }
}

impl RowOperand for SparseMatrix {
    fn n_rows(&self) -> usize {
        SparseMatrix::n_rows(self)
    }
    fn n_cols(&self) -> usize {
        SparseMatrix::n_cols(self)
    }
    fn dense_row(&self, i: usize, buf: &mut [f64]) {
        buf.iter_mut().for_each(|v| *v = 0.0);
        let (cols, vals) = self.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            buf[c as usize] = v;
        }
    }
}

/// `||M - C (C^T M)||_F`, without forming `C C^T`.
pub fn approx_error(m: &impl RowOperand, c: &DenseMatrix) -> Result<f64> {
    if c.rows() != m.n_rows() {
        return Err(Error::dims(
            "approx_error",
            (m.n_rows(), c.cols()),
            c.shape(),
        ));
    }
    let defect = c.orthonormality_defect();
    if !(defect <= 1e-6) {
        return Err(Error::Precondition(alloc::format!(
            "basis is not orthonormal (max |C^T C - I| = {defect:e})"
        )));
    }
    let (n, w, k) = (m.n_rows(), m.n_cols(), c.cols());
    let mut row = vec![0.0; w];
    // G = C^T M, k x w
    let mut g = vec![0.0; k * w];
    for i in 0..n {
        m.dense_row(i, &mut row);
        for (a, &ca) in c.row(i).iter().enumerate() {
            if ca != 0.0 {
                math::axpy(ca, &row, &mut g[a * w..(a + 1) * w]);
            }
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        m.dense_row(i, &mut row);
        for (a, &ca) in c.row(i).iter().enumerate() {
            if ca != 0.0 {
                math::axpy(-ca, &g[a * w..(a + 1) * w], &mut row);
            }
        }
        total += math::dot(&row, &row);
    }
    Ok(math::sqrt(total))
}

/// `(1 + k/(p-1))^(1/2) * (sum_{j>k} sigma_j^2)^(1/2)`: the expected
/// Frobenius error of a Gaussian range finder with `k + p` samples.
pub fn theorem1_bound(sigma: &[f64], k: usize, p: usize) -> Result<f64> {
    if k < 2 || p < 2 {
        return Err(Error::domain(alloc::format!(
            "the bound needs k >= 2 and p >= 2, got k={k} p={p}"
        )));
    }
    if sigma.iter().any(|s| !(*s >= 0.0)) || sigma.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::domain(
            "singular values must be non-negative and descending",
        ));
    }
    let tail: f64 = sigma.iter().skip(k).map(|s| s * s).sum();
    Ok(math::sqrt(1.0 + k as f64 / (p as f64 - 1.0)) * math::sqrt(tail))
}

/// Residual of the best rank-`k` approximation given the full spectrum.
pub fn optimal_error(sigma: &[f64], k: usize) -> f64 {
    math::sqrt(sigma.iter().skip(k).map(|s| s * s).sum())
}

/// Haar-ish random orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    loop {
        let g = gaussian_block(n, n, rng);
        let out = crate::rangefinder::block_orthonormalize(&g, &[], 1);
        if out.degenerate.is_empty() {
            return out.basis;
        }
    }
}

/// Square matrix with prescribed singular values: `U diag(sigma) U^T` when
/// `symmetric`, otherwise `U diag(sigma) V^T` with independent `U`, `V`.
pub fn matrix_with_spectrum<R: Rng + ?Sized>(
    sigma: &[f64],
    symmetric: bool,
    rng: &mut R,
) -> DenseMatrix {
    let n = sigma.len();
    let u = random_orthogonal(n, rng);
    let v = if symmetric {
        u.clone()
    } else {
        random_orthogonal(n, rng)
    };
    let us = DenseMatrix::from_fn(n, n, |i, j| u.get(i, j) * sigma[j]);
    us.matmul(&v.transpose()).expect("square factors")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> DenseMatrix {
        DenseMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    fn reconstruct(t: &SvdTriple) -> DenseMatrix {
        let us = DenseMatrix::from_fn(t.u.rows(), t.sigma.len(), |i, j| t.u.get(i, j) * t.sigma[j]);
        us.matmul(&t.v.transpose()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let t = dense_tsvd(&DenseMatrix::identity(3), 2).unwrap();
        assert_eq!(t.sigma.len(), 2);
        for s in t.sigma {
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_spectrum_and_residual() {
        let m = diag(&[3.0, 2.0, 1.0]);
        let t = dense_tsvd(&m, 2).unwrap();
        assert!((t.sigma[0] - 3.0).abs() < 1e-14 && (t.sigma[1] - 2.0).abs() < 1e-14);
        let mut r = m.clone();
        r.add_scaled(-1.0, &reconstruct(&t)).unwrap();
        assert!((r.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_truncation_residual_matches_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let m = gaussian_block(30, 30, &mut rng);
        let full = dense_svd(&m).unwrap();
        let t = dense_tsvd(&m, 5).unwrap();
        assert!(t.u.orthonormality_defect() < 1e-10);
        assert!(t.v.orthonormality_defect() < 1e-10);
        assert!(t.sigma.windows(2).all(|w| w[0] >= w[1]));
        let mut r = m.clone();
        r.add_scaled(-1.0, &reconstruct(&t)).unwrap();
        assert!((r.frobenius_norm() - optimal_error(&full.sigma, 5)).abs() < 1e-8);
        // Full reconstruction.
        assert!(reconstruct(&full).max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn wide_and_rank_deficient_inputs() {
        let m = DenseMatrix::from_fn(3, 5, |i, j| (i + j) as f64);
        let t = dense_svd(&m).unwrap();
        assert_eq!(t.sigma.len(), 3);
        assert!(t.u.orthonormality_defect() < 1e-10);
        assert!(t.sigma[2] < 1e-10);
        assert!(reconstruct(&t).max_abs_diff(&m) < 1e-10);

        let z = dense_svd(&DenseMatrix::zeros(4, 3)).unwrap();
        assert!(z.u.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn svd_rejects_nonfinite() {
        let mut m = DenseMatrix::identity(2);
        m.set(0, 1, f64::NAN);
        assert!(matches!(dense_svd(&m), Err(Error::Numeric(_))));
    }

    #[test]
    fn approx_error_cases() {
        let m = diag(&[3.0, 2.0]);
        let e1 = DenseMatrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        assert!((approx_error(&m, &e1).unwrap() - 2.0).abs() < 1e-15);
        assert!(approx_error(&m, &DenseMatrix::identity(2)).unwrap() <= 1e-10);
        let sparse = SparseMatrix::from_dense(&m);
        assert!((approx_error(&sparse, &e1).unwrap() - 2.0).abs() < 1e-15);
        let bad = DenseMatrix::from_vec(2, 1, vec![2.0, 0.0]).unwrap();
        assert!(matches!(
            approx_error(&m, &bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn approx_error_of_singular_vectors_is_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = gaussian_block(20, 20, &mut rng);
        let full = dense_svd(&m).unwrap();
        let t = dense_tsvd(&m, 6).unwrap();
        let err = approx_error(&m, &t.u).unwrap();
        assert!((err - optimal_error(&full.sigma, 6)).abs() < 1e-8);
        for _ in 0..20 {
            let c = random_orthogonal(20, &mut rng).columns(0, 6);
            assert!(approx_error(&m, &c).unwrap() >= err - 1e-12);
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(theorem1_bound(&[1.0, 1.0], 2, 2).unwrap(), 0.0);
        let b = theorem1_bound(&[1.0, 0.5, 0.1, 0.05], 2, 2).unwrap();
        assert!((b - 0.193_649_167_310_370_8).abs() < 1e-12);
        let b = theorem1_bound(&[2.0, 1.0, 1.0], 2, 3).unwrap();
        assert!((b - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(theorem1_bound(&[1.0], 1, 2).is_err());
        assert!(theorem1_bound(&[1.0], 2, 1).is_err());
        assert!(theorem1_bound(&[1.0, 2.0], 2, 2).is_err());
    }

    #[test]
    fn prescribed_spectrum_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sigma: Vec<f64> = (1..=12).map(|j| 0.7f64.powi(j)).collect();
        for symmetric in [true, false] {
            let m = matrix_with_spectrum(&sigma, symmetric, &mut rng);
            let got = dense_svd(&m).unwrap().sigma;
            for (a, b) in got.iter().zip(&sigma) {
                assert!((a - b).abs() < 1e-12);
            }
            if symmetric {
                assert!(m.max_abs_diff(&m.transpose()) < 1e-14);
            }
        }
    }
}
