//! Graph signal denoising toolkit.
//!
//! Builds sparse normalized graph operators, applies polynomial spectral
//! filters (Chebyshev, renormalized one-hop, its powers, and the two
//! truncated-resolvent kernels), and cross-checks everything against a dense
//! spectral oracle. On top of that sit noise-injection experiments, a
//! bias-variance Monte-Carlo harness, and semi-supervised node classification
//! with manually checked gradients.

pub mod bias_variance;
pub mod classify;
pub mod datasets;
pub mod denoise;
mod error;
pub mod filters;
pub mod graph;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{FeatureMatrix, Graph, NormalizedOps, SparseMatrix};
