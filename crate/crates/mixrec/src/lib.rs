//! mixrec: finite mixtures of product measures over discrete supports.
//!
//! The crate certifies model identifiability via Kruskal-rank arithmetic,
//! recovers component PMFs and mixing weights from exact or empirical joint
//! probability tensors via truncated SVD and simultaneous diagonalization,
//! and runs Monte-Carlo sweeps that report component-error decay.
//!
//! Modules:
//! - [`model`]: mixture specs, joint tensors, sampling, example families
//! - [`tensor`]: dense unfoldings and mode contractions
//! - [`spectral`]: SVD/eigen kernels, Kruskal ranks, Hadamard products
//! - [`identifiability`]: independence indices, 3-partition certificates,
//!   incoherence profiles, separating witnesses
//! - [`recovery`]: the simultaneous-diagonalization recovery pipeline
//! - [`metrics`]: error metrics and theoretical-bound evaluators
//! - [`sim`]: seeded Monte-Carlo sweeps with CSV/JSON output
//! - [`io`]: model JSON, tensor JSON, and binary dataset formats

pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod recovery;
pub mod sim;
pub mod spectral;
pub mod tensor;

pub mod identifiability;
mod assignment;

pub use error::{Error, Result};
pub use model::{binomial_counterexample, Dataset, JointTensor, MixtureSpec, TensorKind};
