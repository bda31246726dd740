//! Subagging estimation for fully-connected ReLU regression networks.
//!
//! The estimator averages `q` small networks, each trained on one block of a
//! non-stochastic subsample plan (`q = ⌊(n−b)/h⌋ + 1` blocks of length `b` at
//! stride `h`). On top of the averaged point estimator the crate provides:
//!
//! - a scaling-down estimator of the bias order of the network estimator
//!   ([`bias`]),
//! - five confidence-interval constructions for the regression function and a
//!   residual-quantile prediction interval for a future response
//!   ([`intervals`]),
//! - seeded generators for the benchmark regression models ([`simgen`]) and
//!   the scalar error/coverage criteria used to evaluate them ([`metrics`]).
//!
//! Everything is deterministic under a 64-bit master seed: per-member seeds
//! are derived with a splitmix-style mix so that training ensemble members in
//! parallel or sequentially yields bit-identical results.

pub mod bias;
pub mod dataset;
pub mod error;
pub mod intervals;
pub mod metrics;
pub mod nn;
pub mod seeding;
pub mod simgen;
pub mod subagging;
pub mod subsampling;

pub use dataset::{DataView, Dataset};
pub use error::Error;
pub use nn::{NetworkParams, NetworkSpec, TrainConfig};
pub use subagging::{IteratedEnsemble, SubaggingEnsemble};
pub use subsampling::BlockPlan;

pub type Result<T> = std::result::Result<T, Error>;
