//! Stage hooks for timing instrumentation.
//!
//! The core has no clock. Callers that want a cost breakdown pass a [`Probe`]
//! that records wall time between `enter` and `exit`.

/// Cost centers of the embedding pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    /// Drawing Gaussian sketch blocks.
    Rng,
    /// Sparse x dense products with `M` or `M^T`.
    SparseProduct,
    /// Dense products: block projections against earlier blocks.
    DenseProduct,
    /// Intra-block orthonormalization.
    Qr,
    /// Diffusion filter.
    Filter,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Rng,
        Stage::SparseProduct,
        Stage::DenseProduct,
        Stage::Qr,
        Stage::Filter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Rng => "rng",
            Stage::SparseProduct => "sparse",
            Stage::DenseProduct => "dense",
            Stage::Qr => "qr",
            Stage::Filter => "filter",
        }
    }
}

pub trait Probe {
    fn enter(&mut self, _stage: Stage) {}
    fn exit(&mut self, _stage: Stage) {}
}

/// Probe that records nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoProbe;

impl Probe for NoProbe {}

#[inline]
pub(crate) fn timed<T>(probe: &mut dyn Probe, stage: Stage, f: impl FnOnce() -> T) -> T {
    probe.enter(stage);
    let out = f();
    probe.exit(stage);
    out
}
