//! Fast node embeddings for large sparse graphs.
//!
//! The pipeline is:
//!
//! 1. build a CSR [`Graph`] and its transition matrix `T = D^-1 A`,
//! 2. turn `T` into the sparse log-ratio proximity matrix `M` ([`proximity`]),
//! 3. factorize `M ~ C R^T` with a randomized blocked QR range finder using
//!    power iterations ([`rangefinder`]), the rows of `R` being node embeddings,
//! 4. optionally smooth `R` with a polynomial diffusion filter in `T` ([`filter`]).
//!
//! [`oracle`] holds dense reference routines used to validate the randomized
//! path on small inputs, and [`eval`] implements the multi-label node
//! classification protocol (random splits, one-vs-rest logistic regression,
//! Micro/Macro-F1).
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and rayon for the sparse-dense products and the evaluation cells.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dense;
pub mod error;
pub mod eval;
pub mod filter;
pub mod graph;
pub(crate) mod math;
pub mod oracle;
pub mod probe;
pub mod proximity;
pub mod rangefinder;
pub mod sparse;

pub use dense::{DenseMatrix, EmbeddingMatrix};
pub use error::{Error, Result};
pub use filter::{apply_filter, make_filter, FilterSpec, Kernel};
pub use graph::{transition_matrix, Graph, IsolatedPolicy};
pub use probe::{NoProbe, Probe, Stage};
pub use proximity::{build_m, context_weights, ContextWeights, ProximityConfig};
pub use rangefinder::{
    block_orthonormalize, gaussian_block, power_product, rbqr_embed, rbqr_factorize,
    rbqr_factorize_with, Factorization, GaussianSketch, RbqrParams, SketchSource,
};
pub use sparse::SparseMatrix;
