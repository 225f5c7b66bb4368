//! The sparse log-ratio proximity matrix `M`.
//!
//! For every stored entry of the transition matrix,
//! `M[i,j] = ln(p_ij / (lambda * phi_j))`, where `phi_j` is the share of the
//! total transition mass that lands on node `j`. Entries that are not stored
//! in `P` stay structural zeros, so `M` is as sparse as the graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::sparse::SparseMatrix;

/// Negative-sampling noise distribution over context nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextWeights {
    pub phi: Vec<f64>,
    /// Sum of all stored entries of `P` (equals `n` when `P` is row-stochastic).
    pub total_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProximityConfig {
    /// Negative sample ratio, `> 0`.
    pub lambda: f64,
    /// Clamp negative log-ratios to zero and drop them from storage.
    pub truncate_nonpositive: bool,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        ProximityConfig {
            lambda: 1.0,
            truncate_nonpositive: true,
        }
    }
}

impl ProximityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::domain(alloc::format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Column masses of `P` divided by the global mass.
pub fn context_weights(p: &SparseMatrix) -> Result<ContextWeights> {
    if p.n_rows() != p.n_cols() {
        return Err(Error::dims(
            "context_weights",
            (p.n_rows(), p.n_rows()),
            (p.n_rows(), p.n_cols()),
        ));
    }
    let mut col_mass = vec![0.0; p.n_cols()];
    let mut total = 0.0;
    for (_, j, v) in p.iter() {
        col_mass[j] += v;
        total += v;
    }
    if !(total > 0.0) {
        return Err(Error::domain("transition matrix has no positive mass"));
    }
    col_mass.iter_mut().for_each(|m| *m /= total);
    Ok(ContextWeights {
        phi: col_mass,
        total_mass: total,
    })
}

/// Builds `M` from `P` and its context weights.
pub fn build_m(
    p: &SparseMatrix,
    cw: &ContextWeights,
    cfg: &ProximityConfig,
) -> Result<SparseMatrix> {
    cfg.validate()?;
    if cw.phi.len() != p.n_cols() {
        return Err(Error::domain(
            "context weights do not match the matrix width",
        ));
    }
    for (i, j, v) in p.iter() {
        if !(cw.phi[j] > 0.0) {
            return Err(Error::domain(alloc::format!(
                "phi[{j}] is zero but entry ({i},{j}) is stored"
            )));
        }
        if !(v > 0.0) {
            return Err(Error::domain(alloc::format!(
                "non-positive transition entry at ({i},{j})"
            )));
        }
    }
    let lambda = cfg.lambda;
    let m = p.map_values(|_, j, v| math::ln(v / (lambda * cw.phi[j])));
    if cfg.truncate_nonpositive {
        Ok(m.filter_entries(|_, _, v| v > 0.0))
    } else {
        Ok(m)
    }
}
