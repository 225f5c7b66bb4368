//! L2-regularized binary logistic regression fit by L-BFGS, and the
//! one-vs-rest wrapper used for multi-label prediction.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::eval::LabelSet;
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticConfig {
    /// Inverse regularization strength: the objective is
    /// `||w||^2 / 2 + c * sum_i log(1 + exp(-y_i (w.x_i + b)))`.
    /// The intercept is not penalized.
    pub c: f64,
    /// Stop once the Euclidean gradient norm of the per-sample objective is
    /// at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub history: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            c: 1.0,
            tol: 1e-6,
            max_iter: 1000,
            history: 10,
        }
    }
}

/// Per-sample logistic objective over a fixed design matrix.
///
/// Parameters are laid out as `[w_0 .. w_{d-1}, b]`. The value is the
/// regularized loss above divided by `c * N`, which has the same minimizer.
pub struct LogisticObjective<'a> {
    x: &'a DenseMatrix,
    y: &'a [f64],
    reg: f64,
}

impl<'a> LogisticObjective<'a> {
    /// `y` holds `+1` / `-1` targets, one per row of `x`.
    pub fn new(x: &'a DenseMatrix, y: &'a [f64], c: f64) -> Self {
        assert_eq!(x.rows(), y.len());
        let n = x.rows().max(1) as f64;
        LogisticObjective {
            x,
            y,
            reg: 1.0 / (c * n),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.cols() + 1
    }

    /// Objective value, writing the gradient into `grad`.
    pub fn value_and_grad(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.x.cols();
        let (w, b) = (&params[..d], params[d]);
        let inv_n = 1.0 / self.x.rows().max(1) as f64;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for (i, &yi) in self.y.iter().enumerate() {
            let row = self.x.row(i);
            let margin = yi * (math::dot(w, row) + b);
            loss += math::softplus(-margin);
            // d/dz softplus(-y z) = -y * sigmoid(-y z)
            let coeff = -yi * math::sigmoid(-margin) * inv_n;
            math::axpy(coeff, row, &mut grad[..d]);
            grad[d] += coeff;
        }
        let wsq = math::dot(w, w);
        math::axpy(self.reg, w, &mut grad[..d]);
        loss * inv_n + 0.5 * self.reg * wsq
    }
}

/// Outcome of an L-BFGS run.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes a smooth convex objective from the origin.
pub fn lbfgs(
    dim: usize,
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    cfg: &LogisticConfig,
) -> Result<Minimum> {
    let mut x = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    let mut fx = f(&x, &mut g);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(cfg.history);
    let mut dir = vec![0.0; dim];
    let mut x_new = vec![0.0; dim];
    let mut g_new = vec![0.0; dim];
    let mut alpha = vec![0.0; cfg.history];

    let mut iterations = 0;
    let mut gnorm = math::norm2(&g);
    while gnorm > cfg.tol && iterations < cfg.max_iter {
        if !fx.is_finite() {
            return Err(Error::numeric("logistic objective became non-finite"));
        }
        iterations += 1;

        // Two-loop recursion: dir = -H g.
        dir.copy_from_slice(&g);
        for (slot, (s, y, rho)) in history.iter().enumerate().rev() {
            let a = rho * math::dot(s, &dir);
            alpha[slot] = a;
            math::axpy(-a, y, &mut dir);
        }
        let gamma = history.back().map_or(1.0 / gnorm.max(1.0), |(s, y, _)| {
            math::dot(s, y) / math::dot(y, y)
        });
        dir.iter_mut().for_each(|v| *v *= gamma);
        for (slot, (s, y, rho)) in history.iter().enumerate() {
            let beta = rho * math::dot(y, &dir);
            math::axpy(alpha[slot] - beta, s, &mut dir);
        }
        dir.iter_mut().for_each(|v| *v = -*v);

        let mut slope = math::dot(&g, &dir);
        if !(slope < 0.0) {
            history.clear();
            for (d, gi) in dir.iter_mut().zip(&g) {
                *d = -gi;
            }
            slope = -gnorm * gnorm;
        }

        // Backtracking Armijo search.
        let mut step = 1.0;
        let mut accepted = false;
        let mut f_new = fx;
        for _ in 0..60 {
            for ((xn, xi), di) in x_new.iter_mut().zip(&x).zip(&dir) {
                *xn = xi + step * di;
            }
            f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No decrease representable in floating point; we are at the
            // resolution limit of the objective.
            break;
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = math::dot(&s, &y);
        if sy > 1e-16 * math::dot(&y, &y).max(f64::MIN_POSITIVE) {
            if history.len() == cfg.history {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        core::mem::swap(&mut x, &mut x_new);
        core::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        gnorm = math::norm2(&g);
    }
    Ok(Minimum {
        converged: gnorm <= cfg.tol,
        params: x,
        value: fx,
        grad_norm: gnorm,
        iterations,
    })
}

/// One binary scorer of the one-vs-rest ensemble.
#[derive(Clone, Debug, PartialEq)]
pub enum BinaryModel {
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    /// Every training example had the same target.
    Constant {
        positive: bool,
    },
}

impl BinaryModel {
    /// Decision value (log-odds).
    pub fn decision(&self, x: &[f64]) -> f64 {
        match self {
            BinaryModel::Linear { weights, bias } => math::dot(weights, x) + bias,
            BinaryModel::Constant { positive: true } => f64::INFINITY,
            BinaryModel::Constant { positive: false } => f64::NEG_INFINITY,
        }
    }
}

/// Fits one binary model on `x` with `+1 / -1` targets `y`.
pub fn fit_binary(
    x: &DenseMatrix,
    y: &[f64],
    cfg: &LogisticConfig,
) -> Result<(BinaryModel, Minimum)> {
    let obj = LogisticObjective::new(x, y, cfg.c);
    let min = lbfgs(obj.dim(), |p, g| obj.value_and_grad(p, g), cfg)?;
    let d = x.cols();
    let model = BinaryModel::Linear {
        weights: min.params[..d].to_vec(),
        bias: min.params[d],
    };
    Ok((model, min))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OvrModel {
    pub dim: usize,
    pub models: Vec<BinaryModel>,
}

impl OvrModel {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.decision(x)).collect()
    }
}

/// Trains one logistic model per label on the rows `train` of `features`.
///
/// Labels with only positive or only negative training examples get a
/// constant scorer.
pub fn ovr_train(
    features: &DenseMatrix,
    train: &[usize],
    labels: &LabelSet,
    cfg: &LogisticConfig,
) -> Result<OvrModel> {
    if !(cfg.c.is_finite() && cfg.c > 0.0) {
        return Err(Error::domain(
            "inverse regularization strength must be positive",
        ));
    }
    let x = DenseMatrix::from_fn(train.len(), features.cols(), |i, j| {
        features.get(train[i], j)
    });
    if !x.is_finite() {
        return Err(Error::numeric(
            "training features contain non-finite values",
        ));
    }
    let mut models = Vec::with_capacity(labels.n_labels());
    let mut y = vec![0.0; train.len()];
    for label in 0..labels.n_labels() as u32 {
        let mut positives = 0;
        for (yi, &node) in y.iter_mut().zip(train) {
            let hit = labels.has(node, label);
            positives += hit as usize;
            *yi = if hit { 1.0 } else { -1.0 };
        }
        let model = if positives == 0 || positives == train.len() {
            BinaryModel::Constant {
                positive: positives > 0,
            }
        } else {
            fit_binary(&x, &y, cfg)?.0
        };
        models.push(model);
    }
    Ok(OvrModel {
        dim: features.cols(),
        models,
    })
}

/// The `count` labels with the highest scores, ties going to the lower id.
/// Returned in ascending id order.
pub fn top_labels(scores: &[f64], count: usize) -> Vec<u32> {
    let mut idx: Vec<u32> = (0..scores.len() as u32).collect();
    idx.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    idx.truncate(count);
    idx.sort_unstable();
    idx
}

/// For each node in `nodes`, predicts as many labels as `counts` says it has.
pub fn predict_topk(
    model: &OvrModel,
    features: &DenseMatrix,
    nodes: &[usize],
    counts: &[usize],
) -> Vec<Vec<u32>> {
    assert_eq!(nodes.len(), counts.len());
    nodes
        .iter()
        .zip(counts)
        .map(|(&node, &count)| {
            if count == 0 {
                return Vec::new();
            }
            top_labels(&model.scores(features.row(node)), count)
        })
        .collect()
}
