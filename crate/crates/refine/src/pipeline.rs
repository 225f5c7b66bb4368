//! The embedding pipeline with wall-clock timing per stage.

use std::time::{Duration, Instant};

use refine_core::filter::apply_filter_probed;
use refine_core::{
    build_m, context_weights, rbqr_factorize_with, transition_matrix, DenseMatrix, FilterSpec,
    GaussianSketch, Graph, Probe, ProximityConfig, RbqrParams, SparseMatrix, Stage,
};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedConfig {
    pub rbqr: RbqrParams,
    pub proximity: ProximityConfig,
    /// `None` skips the diffusion filter and returns the raw factor.
    pub filter: Option<FilterSpec>,
}

/// Wall time of named pipeline steps, in execution order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Timings {
    pub steps: Vec<(&'static str, Duration)>,
}

impl Timings {
    pub fn time<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.steps.push((name, start.elapsed()));
        out
    }

    pub fn get(&self, name: &str) -> Duration {
        self.steps
            .iter()
            .filter(|(n, _)| *n == name)
            .map(|(_, d)| *d)
            .sum()
    }

    pub fn total(&self) -> Duration {
        self.steps.iter().map(|(_, d)| *d).sum()
    }
}

/// Probe accumulating exclusive wall time per [`Stage`]. Nested stages are
/// charged to the innermost one.
#[derive(Clone, Debug, Default)]
pub struct TimingProbe {
    totals: [Duration; Stage::ALL.len()],
    stack: Vec<(Stage, Instant)>,
}

impl TimingProbe {
    pub fn get(&self, stage: Stage) -> Duration {
        self.totals[stage as usize]
    }

    pub fn total(&self) -> Duration {
        self.totals.iter().sum()
    }
}

impl Probe for TimingProbe {
    fn enter(&mut self, stage: Stage) {
        let now = Instant::now();
        if let Some((outer, since)) = self.stack.last_mut() {
            self.totals[*outer as usize] += now - *since;
            *since = now;
        }
        self.stack.push((stage, now));
    }

    fn exit(&mut self, stage: Stage) {
        let now = Instant::now();
        let (top, since) = self.stack.pop().expect("exit without enter");
        debug_assert_eq!(top, stage);
        self.totals[top as usize] += now - since;
        if let Some((_, since)) = self.stack.last_mut() {
            *since = now;
        }
    }
}

#[derive(Clone, Debug)]
pub struct EmbedRun {
    pub embedding: DenseMatrix,
    /// Orthonormal basis `C` of the factorization.
    pub basis: DenseMatrix,
    pub m: SparseMatrix,
    pub timings: Timings,
    pub stages: TimingProbe,
}

/// transition matrix, context weights, `M`, RBQR factor, then the filter.
pub fn embed_graph(g: &Graph, cfg: &EmbedConfig) -> Result<EmbedRun> {
    let mut timings = Timings::default();
    let mut probe = TimingProbe::default();
    let t = timings.time("transition", || transition_matrix(g))?;
    let cw = timings.time("context", || context_weights(&t))?;
    let m = timings.time("build_m", || build_m(&t, &cw, &cfg.proximity))?;
    let mut sketch = GaussianSketch::new(cfg.rbqr.seed);
    let f = timings.time("rbqr", || {
        rbqr_factorize_with(&m, &cfg.rbqr, &mut sketch, &mut probe)
    })?;
    let embedding = match &cfg.filter {
        Some(spec) => timings.time("filter", || {
            apply_filter_probed(&t, &f.embedding, spec, &mut probe)
        })?,
        None => f.embedding,
    };
    for (name, d) in &timings.steps {
        log::info!("{name:<10} {:>10.3} ms", d.as_secs_f64() * 1e3);
    }
    log::debug!(
        "basis orthonormality defect {:.3e}",
        f.basis.orthonormality_defect()
    );
    Ok(EmbedRun {
        embedding,
        basis: f.basis,
        m,
        timings,
        stages: probe,
    })
}
