//! Polynomial diffusion filter `R* = sum_{k=0..K} theta_k T^k R`.
//!
//! `T^k` is never formed: the filter walks `Z_0 = R, Z_{k+1} = T Z_k` and
//! accumulates `theta_k Z_k`, so it costs exactly `K` sparse-dense products.

use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;
use crate::probe::{timed, NoProbe, Probe, Stage};
use crate::sparse::SparseMatrix;

/// Coefficient family of the filter.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `theta_k = e^-t t^k / k!`.
    Heat { t: f64 },
    /// `theta_k = 1 / (K + 1)`.
    Markov,
    /// Coefficients taken verbatim; the order is `theta.len() - 1`.
    Custom(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec {
    pub kernel: Kernel,
    /// Diffusion order `K`.
    pub order: usize,
    /// `K + 1` coefficients.
    pub theta: Vec<f64>,
}

pub fn make_filter(kernel: Kernel, order: usize) -> Result<FilterSpec> {
    let theta = match &kernel {
        Kernel::Heat { t } => {
            if !(t.is_finite() && *t > 0.0) {
                return Err(Error::domain(alloc::format!(
                    "heat kernel time must be positive, got {t}"
                )));
            }
            let mut theta = Vec::with_capacity(order + 1);
            let mut term = math::exp(-t);
            for k in 0..=order {
                if k > 0 {
                    term *= t / k as f64;
                }
                theta.push(term);
            }
            theta
        }
        Kernel::Markov => alloc::vec![1.0 / (order + 1) as f64; order + 1],
        Kernel::Custom(theta) => {
            if theta.len() != order + 1 {
                return Err(Error::domain(alloc::format!(
                    "order {order} needs {} coefficients, got {}",
                    order + 1,
                    theta.len()
                )));
            }
            if theta.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("filter coefficients must be finite"));
            }
            theta.clone()
        }
    };
    Ok(FilterSpec {
        kernel,
        order,
        theta,
    })
}

impl FilterSpec {
    /// Same filter with coefficients divided by their sum.
    pub fn renormalized(mut self) -> Result<Self> {
        let s: f64 = self.theta.iter().sum();
        if !(s.is_finite() && s != 0.0) {
            return Err(Error::domain(
                "cannot renormalize coefficients summing to zero",
            ));
        }
        self.theta.iter_mut().for_each(|v| *v /= s);
        Ok(self)
    }
}

pub fn apply_filter(t: &SparseMatrix, r: &DenseMatrix, spec: &FilterSpec) -> Result<DenseMatrix> {
    apply_filter_probed(t, r, spec, &mut NoProbe)
}

pub fn apply_filter_probed(
    t: &SparseMatrix,
    r: &DenseMatrix,
    spec: &FilterSpec,
    probe: &mut dyn Probe,
) -> Result<DenseMatrix> {
    if t.n_rows() != t.n_cols() || t.n_cols() != r.rows() {
        return Err(Error::dims(
            "apply_filter",
            (t.n_rows(), r.cols()),
            r.shape(),
        ));
    }
    if spec.theta.len() != spec.order + 1 {
        return Err(Error::domain(
            "filter spec has the wrong number of coefficients",
        ));
    }
    timed(probe, Stage::Filter, || {
        let mut out = r.clone();
        out.scale(spec.theta[0]);
        let mut z = r.clone();
        let mut next = DenseMatrix::zeros(r.rows(), r.cols());
        for &theta in &spec.theta[1..] {
            t.mul_dense_into(&z, &mut next)?;
            core::mem::swap(&mut z, &mut next);
            out.add_scaled(theta, &z)?;
        }
        Ok(out)
    })
}
