//! Offline solvers, upper bounds on the optimum and the streaming baselines.

mod baselines;
mod bounds;
mod solvers;

pub use baselines::{
    robustified_greedy, BaselineFactory, BaselineKind, ThresholdSet,
};
pub use bounds::{certified_upper_bound, opt_upper_bound, BoundMode};
pub use solvers::{brute_force_opt, offline_greedy, OfflineSolver, BRUTE_FORCE_LIMIT};
