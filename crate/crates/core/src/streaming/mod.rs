//! Robust streaming summaries.
//!
//! [`BucketGrid`] implements the three placement rules (item-count robust,
//! removal-cost robust and multi-knapsack); [`GuessLadder`] runs one grid per
//! estimate of the optimum; [`prune`] shrinks a summary and [`robust_query`]
//! answers a query once the removed set is known.

mod grid;
mod ladder;
mod query;
mod run;
mod summary;

pub use grid::{
    ceil_log2, Algorithm, Bucket, BucketGrid, GridParams, GridSnapshot, Partition,
    PartitionSnapshot, Placement,
};
pub use ladder::{guesses_covering, AnchorPolicy, GridFactory, GuessLadder, Sketch, SketchFactory};
pub use query::{prune, prune_all, robust_query};
pub use run::{run_grid, run_ladder};
pub use summary::{flatten, parse_summaries, write_summaries, RobustSummary, SummaryEntry};
