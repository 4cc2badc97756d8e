//! Shrinking a summary and answering a query after removals.

use std::collections::HashSet;

use crate::error::Result;
use crate::objective::{ElementId, Evaluator, KnapsackInstance, Solution, SubmodularFn};
use crate::offline::OfflineSolver;

use super::grid::{BucketGrid, GridParams};
use super::summary::RobustSummary;

/// Replays the summary, cheapest elements first (ties by id), through a fresh
/// grid with the same rules and estimate. The result never has more elements
/// than the input.
pub fn prune<F: SubmodularFn>(
    eval: &Evaluator<F>,
    template: &GridParams,
    summary: &RobustSummary,
) -> Result<BucketGrid<F::State>> {
    let params = template.with_tau_star(summary.tau_star)?;
    let mut order: Vec<_> = summary.entries.iter().collect();
    order.sort_by(|a, b| {
        params
            .element_cost(&a.costs)
            .total_cmp(&params.element_cost(&b.costs))
            .then(a.element.cmp(&b.element))
    });
    let mut grid = BucketGrid::new(params, eval);
    for entry in order {
        grid.offer(eval, entry.element, &entry.costs)?;
    }
    Ok(grid)
}

/// [`prune`] applied to every summary.
pub fn prune_all<F: SubmodularFn>(
    eval: &Evaluator<F>,
    template: &GridParams,
    summaries: &[RobustSummary],
) -> Result<Vec<RobustSummary>> {
    summaries
        .iter()
        .map(|s| prune(eval, template, s).map(|g| g.summary()))
        .collect()
}

/// Runs the offline solver on `T ∖ E` for every summary `T` under the
/// instance's own budget and returns the best solution (earliest on ties).
pub fn robust_query<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    summaries: &[RobustSummary],
    removed: &[ElementId],
    solver: OfflineSolver,
) -> Result<Solution> {
    let removed: HashSet<ElementId> = removed.iter().copied().collect();
    let mut best: Option<Solution> = None;
    for summary in summaries {
        let mut candidates: Vec<ElementId> = summary
            .entries
            .iter()
            .map(|e| e.element)
            .filter(|e| !removed.contains(e))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let solution = solver.solve(eval, instance, &candidates, None)?;
        if best.as_ref().is_none_or(|b| solution.value > b.value) {
            best = Some(solution);
        }
    }
    Ok(best.unwrap_or_else(|| Solution::empty(eval, instance)))
}
