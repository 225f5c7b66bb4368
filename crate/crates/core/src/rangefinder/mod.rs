//! Randomized blocked QR range finder with power iterations.
//!
//! The basis `C` is built `b` columns at a time. For each block a Gaussian
//! sketch `Omega` is pushed through `q` products with `M`, orthonormalized,
//! orthogonalized against the earlier blocks and orthonormalized again. The
//! block's embedding columns are then `R_i = M^T C_i`. The residual
//! `M - R C^T` is never formed, so memory stays at `O(nnz(M) + n k)`.

mod qr;

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::probe::{timed, NoProbe, Probe, Stage};
use crate::sparse::SparseMatrix;

/// How many times a rank-deficient block is re-sketched before giving up.
pub const MAX_REDRAWS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RbqrParams {
    /// Target rank `k`, the embedding dimension.
    pub dim: usize,
    /// Block width `b`. The last block is narrower when `b` does not divide `k`.
    pub block: usize,
    /// Number of products with `M` applied to each sketch.
    pub power: usize,
    pub seed: u64,
    /// Projection passes against earlier blocks (1 or 2).
    pub reorth_passes: usize,
    /// Orthonormalize between power steps. Off by default.
    pub orthonormalize_powers: bool,
}

impl Default for RbqrParams {
    fn default() -> Self {
        RbqrParams {
            dim: 128,
            block: 16,
            power: 3,
            seed: 42,
            reorth_passes: 2,
            orthonormalize_powers: false,
        }
    }
}

impl RbqrParams {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.dim == 0 || self.block == 0 || self.block > self.dim {
            return Err(Error::domain(alloc::format!(
                "need 1 <= block <= dim, got block={} dim={}",
                self.block,
                self.dim
            )));
        }
        if self.power == 0 {
            return Err(Error::domain("power iteration count must be at least 1"));
        }
        if self.dim > n {
            return Err(Error::domain(alloc::format!(
                "dim {} exceeds the node count {n}",
                self.dim
            )));
        }
        if !(1..=2).contains(&self.reorth_passes) {
            return Err(Error::domain("reorth_passes must be 1 or 2"));
        }
        Ok(())
    }

    /// Number of blocks, `ceil(dim / block)`.
    pub fn num_blocks(&self) -> usize {
        self.dim.div_ceil(self.block)
    }
}

/// Source of sketch blocks.
///
/// [`GaussianSketch`] draws fresh standard normals. Other implementations can
/// serve draws from a precomputed pool, or scale them.
pub trait SketchSource {
    /// Overwrites every entry of `out`.
    fn fill(&mut self, out: &mut DenseMatrix);
}

/// Seeded stream of i.i.d. `N(0, 1)` entries.
#[derive(Clone, Debug)]
pub struct GaussianSketch {
    rng: ChaCha8Rng,
}

impl GaussianSketch {
    pub fn new(seed: u64) -> Self {
        GaussianSketch {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl SketchSource for GaussianSketch {
    fn fill(&mut self, out: &mut DenseMatrix) {
        for v in out.as_mut_slice() {
            *v = StandardNormal.sample(&mut self.rng);
        }
    }
}

/// `rows x cols` matrix of i.i.d. standard normal draws from `rng`.
pub fn gaussian_block<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rows, cols);
    for v in out.as_mut_slice() {
        *v = StandardNormal.sample(rng);
    }
    out
}

/// `M^q * Omega` as `q` successive sparse-dense products.
pub fn power_product(m: &SparseMatrix, omega: &DenseMatrix, q: usize) -> Result<DenseMatrix> {
    power_product_probed(m, omega, q, false, &mut NoProbe)
}

fn power_product_probed(
    m: &SparseMatrix,
    omega: &DenseMatrix,
    q: usize,
    orthonormalize: bool,
    probe: &mut dyn Probe,
) -> Result<DenseMatrix> {
    if m.n_rows() != m.n_cols() {
        return Err(Error::dims(
            "power_product",
            (m.n_rows(), m.n_rows()),
            (m.n_rows(), m.n_cols()),
        ));
    }
    if omega.rows() != m.n_cols() {
        return Err(Error::dims(
            "power_product",
            (m.n_cols(), omega.cols()),
            omega.shape(),
        ));
    }
    if q == 0 {
        return Err(Error::domain("power iteration count must be at least 1"));
    }
    let mut cur = omega.clone();
    let mut next = DenseMatrix::zeros(m.n_rows(), omega.cols());
    for step in 0..q {
        timed(probe, Stage::SparseProduct, || {
            m.mul_dense_into(&cur, &mut next)
        })?;
        core::mem::swap(&mut cur, &mut next);
        if orthonormalize && step + 1 < q {
            timed(probe, Stage::Qr, || {
                qr::orthonormalize_columns(&mut cur, None)
            });
        }
    }
    if !cur.is_finite() {
        return Err(Error::numeric(alloc::format!(
            "M^{q} * Omega overflowed; try a smaller power count or enable orthonormalize_powers"
        )));
    }
    Ok(cur)
}

/// Result of orthonormalizing one block.
#[derive(Clone, Debug, PartialEq)]
pub struct Orthonormalized {
    /// Orthonormal columns that survived, orthogonal to the earlier blocks.
    pub basis: DenseMatrix,
    /// Input columns that collapsed after projection (rank deficiency).
    pub degenerate: Vec<usize>,
}

/// `C_i = QR(QR(y) - sum_j C_j C_j^T QR(y))`, the projection being repeated
/// `passes` times.
///
/// Columns that vanish during projection are reported in
/// [`Orthonormalized::degenerate`] and left out of the basis.
pub fn block_orthonormalize(
    y: &DenseMatrix,
    prev: &[DenseMatrix],
    passes: usize,
) -> Orthonormalized {
    orthonormalize_probed(y, prev, passes, &mut NoProbe)
}

fn orthonormalize_probed(
    y: &DenseMatrix,
    prev: &[DenseMatrix],
    passes: usize,
    probe: &mut dyn Probe,
) -> Orthonormalized {
    for p in prev {
        assert_eq!(
            p.rows(),
            y.rows(),
            "previous block has a different row count"
        );
    }
    let mut q = y.clone();
    let mut degenerate = timed(probe, Stage::Qr, || {
        qr::orthonormalize_columns(&mut q, None)
    });
    if !prev.is_empty() {
        for _ in 0..passes.max(1) {
            let reference = qr::column_norms(&q);
            timed(probe, Stage::DenseProduct, || qr::project_out(&mut q, prev));
            degenerate = timed(probe, Stage::Qr, || {
                qr::orthonormalize_columns(&mut q, Some(&reference))
            });
        }
    }
    let basis = if degenerate.is_empty() {
        q
    } else {
        let keep: Vec<usize> = (0..q.cols()).filter(|j| !degenerate.contains(j)).collect();
        DenseMatrix::from_fn(q.rows(), keep.len(), |i, j| q.get(i, keep[j]))
    };
    Orthonormalized { basis, degenerate }
}

/// Embedding `R` (`n x k`) together with the orthonormal basis `C`, so that
/// `M ~ C R^T` with `R = M^T C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub embedding: DenseMatrix,
    pub basis: DenseMatrix,
}

pub fn rbqr_embed(m: &SparseMatrix, params: &RbqrParams) -> Result<DenseMatrix> {
    rbqr_factorize(m, params).map(|f| f.embedding)
}

pub fn rbqr_factorize(m: &SparseMatrix, params: &RbqrParams) -> Result<Factorization> {
    let mut sketch = GaussianSketch::new(params.seed);
    rbqr_factorize_with(m, params, &mut sketch, &mut NoProbe)
}

/// Full control over the sketch source and instrumentation.
pub fn rbqr_factorize_with(
    m: &SparseMatrix,
    params: &RbqrParams,
    sketch: &mut dyn SketchSource,
    probe: &mut dyn Probe,
) -> Result<Factorization> {
    let n = m.n_rows();
    if m.n_cols() != n {
        return Err(Error::dims("rbqr", (n, n), (m.n_rows(), m.n_cols())));
    }
    params.validate(n)?;
    let mt = timed(probe, Stage::SparseProduct, || m.transpose());

    let mut bases: Vec<DenseMatrix> = Vec::with_capacity(params.num_blocks());
    let mut embeddings: Vec<DenseMatrix> = Vec::with_capacity(params.num_blocks());
    let mut filled = 0;
    while filled < params.dim {
        let width = params.block.min(params.dim - filled);
        let block_index = bases.len();
        let mut attempts = 0;
        let c = loop {
            attempts += 1;
            let mut omega = DenseMatrix::zeros(n, width);
            timed(probe, Stage::Rng, || sketch.fill(&mut omega));
            let y =
                power_product_probed(m, &omega, params.power, params.orthonormalize_powers, probe)?;
            let out = orthonormalize_probed(&y, &bases, params.reorth_passes, probe);
            if out.degenerate.is_empty() {
                break out.basis;
            }
            if attempts > MAX_REDRAWS {
                return Err(Error::Degenerate {
                    block: block_index,
                    attempts,
                });
            }
        };
        let r = timed(probe, Stage::SparseProduct, || mt.mul_dense(&c))?;
        bases.push(c);
        embeddings.push(r);
        filled += width;
    }

    let embedding = DenseMatrix::hconcat(&embeddings)?;
    if !embedding.is_finite() {
        return Err(Error::numeric("embedding contains non-finite values"));
    }
    Ok(Factorization {
        embedding,
        basis: DenseMatrix::hconcat(&bases)?,
    })
}
