//! Multi-label node classification protocol.
//!
//! For each training ratio and repeat: split the labeled nodes at random,
//! train one-vs-rest logistic regression on the training rows, predict for
//! every test node as many labels as it truly has (the top-scoring ones) and
//! score the predictions with Micro- and Macro-F1.

mod logistic;
mod metrics;

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;

pub use logistic::{
    fit_binary, lbfgs, ovr_train, predict_topk, top_labels, BinaryModel, LogisticConfig,
    LogisticObjective, Minimum, OvrModel,
};
pub use metrics::{f1_scores, F1Scores};

/// Per-node label sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabelSet {
    labels: Vec<Vec<u32>>,
    n_labels: usize,
}

impl LabelSet {
    /// `n` nodes, none labeled yet.
    pub fn new(n: usize) -> Self {
        LabelSet {
            labels: alloc::vec![Vec::new(); n],
            n_labels: 0,
        }
    }

    /// Adds `label` to `node`; repeated pairs are ignored.
    pub fn insert(&mut self, node: usize, label: u32) {
        let set = &mut self.labels[node];
        if let Err(pos) = set.binary_search(&label) {
            set.insert(pos, label);
        }
        self.n_labels = self.n_labels.max(label as usize + 1);
    }

    /// Raises the label count, e.g. when some label ids never occur.
    pub fn reserve_labels(&mut self, n_labels: usize) {
        self.n_labels = self.n_labels.max(n_labels);
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    /// Sorted labels of `node`.
    pub fn labels(&self, node: usize) -> &[u32] {
        &self.labels[node]
    }

    pub fn has(&self, node: usize, label: u32) -> bool {
        self.labels[node].binary_search(&label).is_ok()
    }

    /// Nodes with at least one label, ascending.
    pub fn labeled_nodes(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| !self.labels[i].is_empty())
            .collect()
    }
}

/// Train/test partition of the labeled nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Uniformly random split with `round(ratio * labeled)` training nodes.
pub fn split(labels: &LabelSet, ratio: f64, seed: u64) -> Result<Split> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::domain(alloc::format!(
            "training ratio {ratio} outside (0, 1)"
        )));
    }
    let mut nodes = labels.labeled_nodes();
    let n_train = math::round(ratio * nodes.len() as f64) as usize;
    if n_train == 0 || n_train >= nodes.len() {
        return Err(Error::domain(alloc::format!(
            "ratio {ratio} over {} labeled nodes leaves an empty train or test set",
            nodes.len()
        )));
    }
    nodes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = nodes.split_off(n_train);
    nodes.sort_unstable();
    test.sort_unstable();
    Ok(Split { train: nodes, test })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub ratios: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub classifier: LogisticConfig,
    /// Scale embedding rows to unit length before training.
    pub normalize_rows: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            ratios: alloc::vec![0.1, 0.3, 0.5, 0.7, 0.9],
            repeats: 10,
            seed: 0,
            classifier: LogisticConfig::default(),
            normalize_rows: true,
        }
    }
}

/// Scores of one `(ratio, repeat)` trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalCell {
    pub ratio: f64,
    pub repeat: usize,
    pub micro_f1: f64,
    pub macro_f1: f64,
}

/// Mean and population standard deviation over the repeats of one ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioSummary {
    pub ratio: f64,
    pub repeats: usize,
    pub micro_mean: f64,
    pub micro_std: f64,
    pub macro_mean: f64,
    pub macro_std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub cells: Vec<EvalCell>,
    pub summaries: Vec<RatioSummary>,
}

impl EvalReport {
    /// Groups cells by ratio, in order of first appearance.
    pub fn from_cells(cells: Vec<EvalCell>) -> Self {
        let mut ratios: Vec<f64> = Vec::new();
        for c in &cells {
            if !ratios.contains(&c.ratio) {
                ratios.push(c.ratio);
            }
        }
        let summaries = ratios
            .into_iter()
            .map(|ratio| {
                let micro: Vec<f64> = cells
                    .iter()
                    .filter(|c| c.ratio == ratio)
                    .map(|c| c.micro_f1)
                    .collect();
                let macro_: Vec<f64> = cells
                    .iter()
                    .filter(|c| c.ratio == ratio)
                    .map(|c| c.macro_f1)
                    .collect();
                let (micro_mean, micro_std) = mean_std(&micro);
                let (macro_mean, macro_std) = mean_std(&macro_);
                RatioSummary {
                    ratio,
                    repeats: micro.len(),
                    micro_mean,
                    micro_std,
                    macro_mean,
                    macro_std,
                }
            })
            .collect();
        EvalReport { cells, summaries }
    }

    pub fn summary(&self, ratio: f64) -> Option<&RatioSummary> {
        self.summaries.iter().find(|s| s.ratio == ratio)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, math::sqrt(var))
}

/// Seed of the `counter`-th trial (SplitMix64 finalizer over the master seed).
pub fn cell_seed(master: u64, counter: u64) -> u64 {
    let mut z = master.wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one split / train / predict / score trial.
pub fn run_cell(
    features: &DenseMatrix,
    labels: &LabelSet,
    ratio: f64,
    seed: u64,
    cfg: &LogisticConfig,
) -> Result<F1Scores> {
    let parts = split(labels, ratio, seed)?;
    let model = ovr_train(features, &parts.train, labels, cfg)?;
    let counts: Vec<usize> = parts.test.iter().map(|&i| labels.labels(i).len()).collect();
    let predicted = predict_topk(&model, features, &parts.test, &counts);
    let truth: Vec<Vec<u32>> = parts
        .test
        .iter()
        .map(|&i| labels.labels(i).to_vec())
        .collect();
    Ok(f1_scores(&predicted, &truth, labels.n_labels()))
}

/// Full `ratios x repeats` protocol.
pub fn run_protocol(
    embeddings: &DenseMatrix,
    labels: &LabelSet,
    cfg: &ProtocolConfig,
) -> Result<EvalReport> {
    if embeddings.rows() != labels.n() {
        return Err(Error::domain(alloc::format!(
            "embedding has {} rows but labels cover {} nodes",
            embeddings.rows(),
            labels.n()
        )));
    }
    if cfg.repeats == 0 || cfg.ratios.is_empty() {
        return Err(Error::domain(
            "protocol needs at least one ratio and one repeat",
        ));
    }
    if !embeddings.is_finite() {
        return Err(Error::numeric("embedding contains non-finite values"));
    }
    let mut features = embeddings.clone();
    if cfg.normalize_rows {
        features.normalize_rows();
    }

    let jobs: Vec<(f64, usize, u64)> = cfg
        .ratios
        .iter()
        .enumerate()
        .flat_map(|(ri, &ratio)| {
            (0..cfg.repeats).map(move |rep| (ratio, rep, (ri * cfg.repeats + rep) as u64))
        })
        .collect();
    let run = |&(ratio, repeat, counter): &(f64, usize, u64)| -> Result<EvalCell> {
        let f1 = run_cell(
            &features,
            labels,
            ratio,
            cell_seed(cfg.seed, counter),
            &cfg.classifier,
        )?;
        Ok(EvalCell {
            ratio,
            repeat,
            micro_f1: f1.micro,
            macro_f1: f1.macro_,
        })
    };

    #[cfg(feature = "parallel")]
    let cells: Result<Vec<EvalCell>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Result<Vec<EvalCell>> = jobs.iter().map(run).collect();

    Ok(EvalReport::from_cells(cells?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hundred_labeled() -> LabelSet {
        let mut l = LabelSet::new(120);
        for i in 0..100 {
            l.insert(i, (i % 3) as u32);
        }
        l
    }

    #[test]
    fn label_union_semantics() {
        let mut l = LabelSet::new(2);
        l.insert(0, 3);
        l.insert(1, 3);
        l.insert(1, 5);
        l.insert(0, 3);
        assert_eq!(l.labels(0), &[3]);
        assert_eq!(l.labels(1), &[3, 5]);
        assert!(l.n_labels() >= 6);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let l = hundred_labeled();
        let s = split(&l, 0.1, 7).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (10, 90));
        assert_eq!(s, split(&l, 0.1, 7).unwrap());
        assert_ne!(s, split(&l, 0.1, 8).unwrap());
        assert!(s.train.iter().chain(&s.test).all(|&i| i < 100));
        for ratio in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let s = split(&l, ratio, 1).unwrap();
            assert_eq!(s.train.len() + s.test.len(), 100);
        }
    }

    #[test]
    fn split_rejects_degenerate_ratios() {
        let l = hundred_labeled();
        assert!(split(&l, 0.0, 0).is_err());
        assert!(split(&l, 1.0, 0).is_err());
        assert!(split(&l, 0.001, 0).is_err());
        assert!(split(&l, 0.999, 0).is_err());
    }

    #[test]
    fn single_repeat_has_zero_std() {
        let cells = alloc::vec![EvalCell {
            ratio: 0.5,
            repeat: 0,
            micro_f1: 0.4,
            macro_f1: 0.3
        }];
        let r = EvalReport::from_cells(cells);
        assert_eq!(r.summaries[0].micro_std, 0.0);
        assert_eq!(r.summaries[0].micro_mean, 0.4);
    }

    #[test]
    fn cell_seeds_differ() {
        let a: Vec<u64> = (0..50).map(|c| cell_seed(1, c)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(a.len(), b.len());
    }
}
