//! End-to-end experiment pipeline: configuration, dataset preparation,
//! summary construction for every algorithm, the shared removal schedule
//! with per-round scores, the two-round protocol and the invariant suite.

mod config;
mod invariants;
mod pipeline;

pub use config::{AlgorithmChoice, CostSource, DatasetKind, ExperimentConfig, GammaPolicy};
pub use invariants::{invariant_suite, InvariantReport};
pub use pipeline::{
    build_all, build_grid, build_stats_csv, default_size_bound, evaluate_builds, grid_template,
    match_gamma, prepare, run_distributed, upper_bound, AlgorithmBuild, DistributedReport,
    Evaluation, GuessRun, PreparedWorkload, StageSeeds, SummaryFile, Workload, GAMMA_STEPS,
    SIZE_TOLERANCE, SUMMARY_FORMAT,
};
