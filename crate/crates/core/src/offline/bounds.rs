use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, SubmodularFn};

use super::solvers::{fits, OrdF64};

/// Which closed-form bound [`opt_upper_bound`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    /// `f(S) / (1 − e^{−c(S)/K})` for a greedy set `S`.
    Single,
    /// `f(S) · (1 + 2d)` for a multidimensional-threshold set `S`.
    Multi,
}

/// Closed-form upper bound on the optimum from a reference solution.
pub fn opt_upper_bound(value: f64, cost: f64, budget: f64, dims: usize, mode: BoundMode) -> Result<f64> {
    if value == 0.0 {
        return Ok(0.0);
    }
    match mode {
        BoundMode::Single => {
            if !(cost > 0.0) {
                return Err(Error::InconsistentBound(format!(
                    "reference set has value {value} but cost {cost}"
                )));
            }
            Ok(value / (1.0 - (-cost / budget).exp()))
        }
        BoundMode::Multi => Ok(value * (1.0 + 2.0 * dims as f64)),
    }
}

/// Upper bound on the best feasible value within `candidates`, certified by
/// an unconstrained density-greedy run.
///
/// Let `G_i` be the first `i` picks of greedy by `gain / max_a c_a` over all
/// candidates and `ρ_i` the best density against `G_i`. Any feasible `O`
/// satisfies `Σ_{o∈O} max_a c_a(o) ≤ dK`, so
/// `f(O) ≤ f(G_i) + dK·ρ_i` and, unrolling, `f(O) − f(∅) ≤
/// (f(G_i) − f(∅)) / (1 − e^{−c(G_i)/(dK)})` where `c` is the summed max
/// cost. The minimum over all prefixes is returned. Candidates that do not
/// fit on their own are ignored.
pub fn certified_upper_bound<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    candidates: &[ElementId],
) -> f64 {
    let budgets = instance.budgets();
    let dims = instance.dims();
    let scale = dims as f64 * budgets.iter().copied().fold(f64::MIN, f64::max);
    let zero = vec![0.0; dims];
    let mut pool: Vec<ElementId> = candidates
        .iter()
        .copied()
        .filter(|&e| fits(&zero, instance.costs(e), budgets))
        .collect();
    pool.sort_unstable();
    pool.dedup();

    let mut state = eval.empty_state();
    let base = eval.empty_value();
    let mut value = base;
    if pool.is_empty() {
        return base;
    }
    let mut heap = BinaryHeap::with_capacity(pool.len());
    for &e in &pool {
        let v = eval.value_with(&state, e);
        heap.push((OrdF64((v - value).max(0.0) / instance.max_cost(e)), Reverse(e), 0usize, OrdF64(v)));
    }
    let mut bound = f64::INFINITY;
    let mut spent = 0.0;
    let mut round = 0;
    while let Some((OrdF64(density), Reverse(e), stamp, OrdF64(v))) = heap.pop() {
        if stamp != round {
            let v = eval.value_with(&state, e);
            let d = (v - value).max(0.0) / instance.max_cost(e);
            heap.push((OrdF64(d), Reverse(e), round, OrdF64(v)));
            continue;
        }
        bound = bound.min(value + scale * density);
        if spent > 0.0 {
            bound = bound.min(base + (value - base) / (1.0 - (-spent / scale).exp()));
        }
        if density <= 0.0 || spent > 4.0 * scale {
            break;
        }
        eval.insert(&mut state, e);
        value = v;
        spent += instance.max_cost(e);
        round += 1;
    }
    if heap.is_empty() {
        // Everything was taken: the optimum is at most f(candidates).
        bound = bound.min(value);
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::WeightedCoverage;
    use crate::offline::brute_force_opt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_examples() {
        let b = opt_upper_bound(0.63, 10.0, 10.0, 1, BoundMode::Single).unwrap();
        assert!((b - 0.63 / (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((b - 0.9967).abs() < 1e-3);
        assert_eq!(opt_upper_bound(2.0, 3.0, 10.0, 2, BoundMode::Multi).unwrap(), 10.0);
        assert_eq!(opt_upper_bound(0.0, 0.0, 10.0, 1, BoundMode::Single).unwrap(), 0.0);
        assert!(matches!(
            opt_upper_bound(1.0, 0.0, 10.0, 1, BoundMode::Single),
            Err(Error::InconsistentBound(_))
        ));
    }

    #[test]
    fn certified_bound_dominates_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(1..=10);
            let d = rng.gen_range(1..=2);
            let universe = 10;
            let weights: Vec<f64> = (0..universe).map(|_| rng.gen_range(0.5..3.0)).collect();
            let sets = (0..n)
                .map(|_| (0..universe as u32).filter(|_| rng.gen_bool(0.3)).collect())
                .collect();
            let eval = Evaluator::new(WeightedCoverage::new(weights, sets));
            let rows: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..n).map(|_| rng.gen_range(1.0..4.0)).collect())
                .collect();
            let k = rng.gen_range(1.0..8.0);
            let inst = KnapsackInstance::normalized_from_rows(rows, k).unwrap();
            let ids: Vec<ElementId> = (0..n as ElementId).collect();
            let opt = brute_force_opt(&eval, &inst, &ids, None).unwrap();
            let ub = certified_upper_bound(&eval, &inst, &ids);
            assert!(ub >= opt.value - 1e-9, "bound {ub} below optimum {}", opt.value);
        }
    }
}
