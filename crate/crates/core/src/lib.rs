//! Link prediction benchmarking toolkit.
//!
//! The crate evaluates link prediction methods — neighborhood heuristics and
//! node embeddings — under a leakage-safe protocol: edges are split into a
//! train set and a held-out test set, non-edges are sampled as negatives, all
//! features are computed on the train graph only, and test AUC-ROC is reported
//! over held-out edge/non-edge pairs.
//!
//! Modules follow the stages of that protocol:
//!
//! * [`graph`] — compact undirected graphs, edge-list IO, main component.
//! * [`split`] — train/test edge splits (random, spanning tree, depth-first
//!   tree, timestamp), non-edge sampling, validation splits, persistence.
//! * [`heuristics`] — common neighbors, Jaccard, Adamic-Adar, resource
//!   allocation, preferential attachment, and the stacked 5-feature variant.
//! * [`embed`] — graph factorization, Laplacian eigenmaps, biased random
//!   walks + skip-gram negative sampling, edge-sampling embeddings, and an
//!   adapter for external embedding programs.
//! * [`predict`] — node-pair operators, logistic regression (with and without
//!   internal cross-validation), decision trees.
//! * [`metrics`] — AUC-ROC with tie handling, tail transform, thresholding.
//! * [`pipeline`] — task orchestration, hyperparameter/operator tuning, a
//!   resumable results store.
//! * [`config`] / [`report`] — experiment configs and result rendering.

pub mod config;
pub mod embed;
mod error;
pub mod gen;
pub mod graph;
pub mod heuristics;
mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod predict;
pub mod report;
mod seeds;
pub mod split;

pub use error::{Error, Result};
