//! Adversarially robust monotone submodular maximization under knapsack
//! constraints.
//!
//! The crate builds small *robust summaries* of a stream: after an adversary
//! deletes an arbitrary set of elements, running an offline solver on what is
//! left of the summary still approximates the best solution of the surviving
//! ground set.
//!
//! Layout:
//!
//! - [`objective`]: instances, normalization, the oracle contract and call
//!   accounting.
//! - [`objectives`]: dominating set, movie coverage, weighted coverage and the
//!   cost generators.
//! - [`streaming`]: the partition/bucket grid (number-, size- and
//!   multi-knapsack variants), pruning, the threshold-guess ladder and the
//!   post-removal query.
//! - [`offline`]: density greedy, the brute-force oracle and the robustified
//!   baselines.
//! - [`adversary`]: the shared recursive removal schedule and per-round scoring.
//! - [`distributed`]: the in-process two-round protocol.
//! - [`ingest`]: SNAP edge lists, MovieLens files and subsampling.
//! - [`experiment`]: the end-to-end build/evaluate pipeline used by the CLI.

// Negated comparisons deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod distributed;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod objective;
pub mod objectives;
pub mod offline;
pub mod streaming;

pub use error::{Error, Result};
pub use objective::{
    is_feasible, marginal_density, normalize, ElementId, Evaluator, KnapsackInstance, Solution,
    SubmodularFn,
};
