//! Running grids and ladders over an instance's stream.

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, SubmodularFn};

use super::grid::{Algorithm, BucketGrid, GridParams};
use super::ladder::{AnchorPolicy, GridFactory, GuessLadder};

fn check(instance: &KnapsackInstance, params: &GridParams) -> Result<()> {
    if params.algorithm == Algorithm::Mult && !instance.is_normalized() {
        return Err(Error::InvalidState(
            "the multi-knapsack grid needs a normalized instance".into(),
        ));
    }
    if params.dims != instance.dims() {
        return Err(Error::InvalidArgument(format!(
            "grid expects {} knapsacks, instance has {}",
            params.dims,
            instance.dims()
        )));
    }
    Ok(())
}

/// One grid over `stream`.
pub fn run_grid<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    params: &GridParams,
    stream: &[ElementId],
) -> Result<BucketGrid<F::State>> {
    check(instance, params)?;
    let mut grid = BucketGrid::new(params.clone(), eval);
    for &e in stream {
        grid.offer(eval, e, instance.costs(e))?;
    }
    Ok(grid)
}

/// A guess ladder of grids over `stream`.
pub fn run_ladder<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    template: &GridParams,
    epsilon: f64,
    policy: AnchorPolicy,
    stream: &[ElementId],
) -> Result<GuessLadder<F, GridFactory>> {
    check(instance, template)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    let mut ladder = GuessLadder::new(GridFactory::new(template.clone()), epsilon, policy)?;
    for &e in stream {
        ladder.offer(eval, e, instance.costs(e))?;
    }
    Ok(ladder)
}
