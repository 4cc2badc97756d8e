use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, Solution, SubmodularFn};

/// Largest candidate set [`brute_force_opt`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Solver used on a summary once the removed set is known.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OfflineSolver {
    /// Density greedy, compared with the best singleton.
    #[default]
    Greedy,
    /// Exhaustive search; small candidate sets only.
    BruteForce,
}

impl OfflineSolver {
    pub fn name(self) -> &'static str {
        match self {
            OfflineSolver::Greedy => "greedy",
            OfflineSolver::BruteForce => "brute-force",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "greedy" => Some(OfflineSolver::Greedy),
            "brute-force" => Some(OfflineSolver::BruteForce),
            _ => None,
        }
    }

    /// Best set among `candidates` under the instance budgets, or under a
    /// common `budget` for every knapsack when given.
    pub fn solve<F: SubmodularFn>(
        self,
        eval: &Evaluator<F>,
        instance: &KnapsackInstance,
        candidates: &[ElementId],
        budget: Option<f64>,
    ) -> Result<Solution> {
        match self {
            OfflineSolver::Greedy => Ok(offline_greedy(eval, instance, candidates, budget)),
            OfflineSolver::BruteForce => brute_force_opt(eval, instance, candidates, budget),
        }
    }
}

/// `f64` ordered by `total_cmp`, for heaps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub(crate) fn budgets_for(instance: &KnapsackInstance, budget: Option<f64>) -> Vec<f64> {
    match budget {
        Some(b) => vec![b; instance.dims()],
        None => instance.budgets().to_vec(),
    }
}

pub(crate) fn fits(totals: &[f64], costs: &[f64], budgets: &[f64]) -> bool {
    totals
        .iter()
        .zip(costs)
        .zip(budgets)
        .all(|((t, c), b)| t + c <= *b)
}

/// Entry of a lazy-greedy heap: density bound, element, round in which the
/// bound was computed, and `f(S ∪ {e})` at that round.
type LazyEntry = (OrdF64, Reverse<ElementId>, usize, OrdF64);

/// Density greedy over `candidates`: repeatedly adds the fitting element of
/// largest `gain / max_a c_a(e)` (ties to the smaller id) while some fitting
/// element has positive gain, then returns the better of that set and the
/// best feasible singleton.
///
/// Gains are evaluated lazily; by submodularity a stale gain is an upper
/// bound, so the selected sequence is the one plain greedy would pick.
pub fn offline_greedy<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    candidates: &[ElementId],
    budget: Option<f64>,
) -> Solution {
    let budgets = budgets_for(instance, budget);
    let dims = instance.dims();
    let zero = vec![0.0; dims];
    let mut pool: Vec<ElementId> = candidates
        .iter()
        .copied()
        .filter(|&e| fits(&zero, instance.costs(e), &budgets))
        .collect();
    pool.sort_unstable();
    pool.dedup();
    if pool.is_empty() {
        return Solution::empty(eval, instance);
    }

    let mut state = eval.empty_state();
    let mut value = eval.empty_value();
    let mut heap: BinaryHeap<LazyEntry> = BinaryHeap::with_capacity(pool.len());
    let mut best_single: Option<(f64, ElementId)> = None;
    for &e in &pool {
        let v = eval.value_with(&state, e);
        if best_single.is_none_or(|(bv, _)| v > bv) {
            best_single = Some((v, e));
        }
        let density = (v - value).max(0.0) / instance.max_cost(e);
        heap.push((OrdF64(density), Reverse(e), 0, OrdF64(v)));
    }

    let mut chosen = Vec::new();
    let mut totals = zero;
    let mut round = 0;
    while let Some((OrdF64(density), Reverse(e), stamp, OrdF64(v))) = heap.pop() {
        let costs = instance.costs(e);
        if !fits(&totals, costs, &budgets) {
            continue;
        }
        if stamp == round {
            if density <= 0.0 {
                break;
            }
            eval.insert(&mut state, e);
            value = v;
            chosen.push(e);
            for (t, c) in totals.iter_mut().zip(costs) {
                *t += c;
            }
            round += 1;
        } else {
            let v = eval.value_with(&state, e);
            let density = (v - value).max(0.0) / instance.max_cost(e);
            heap.push((OrdF64(density), Reverse(e), round, OrdF64(v)));
        }
    }

    let (single_value, single) = best_single.expect("pool is non-empty");
    if single_value > value {
        return Solution {
            elements: vec![single],
            value: single_value,
            cost_totals: instance.costs(single).to_vec(),
        };
    }
    chosen.sort_unstable();
    Solution {
        elements: chosen,
        value,
        cost_totals: totals,
    }
}

/// Exhaustive maximum over feasible subsets of `candidates`; ties go to the
/// lexicographically smallest sorted element list.
pub fn brute_force_opt<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    candidates: &[ElementId],
    budget: Option<f64>,
) -> Result<Solution> {
    let mut pool = candidates.to_vec();
    pool.sort_unstable();
    pool.dedup();
    if pool.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Refused(format!(
            "exhaustive search over {} elements (limit {BRUTE_FORCE_LIMIT})",
            pool.len()
        )));
    }
    let budgets = budgets_for(instance, budget);
    let mut search = Search {
        eval,
        instance,
        budgets: &budgets,
        pool: &pool,
        current: Vec::new(),
        best_value: eval.empty_value(),
        best: Vec::new(),
    };
    let totals = vec![0.0; instance.dims()];
    search.descend(0, &eval.empty_state(), &totals);
    let elements = search.best;
    let value = search.best_value;
    Ok(Solution {
        cost_totals: instance.cost_totals(&elements),
        elements,
        value,
    })
}

struct Search<'a, F: SubmodularFn> {
    eval: &'a Evaluator<F>,
    instance: &'a KnapsackInstance,
    budgets: &'a [f64],
    pool: &'a [ElementId],
    current: Vec<ElementId>,
    best_value: f64,
    best: Vec<ElementId>,
}

impl<F: SubmodularFn> Search<'_, F> {
    /// Pre-order walk, which visits sorted subsets in lexicographic order.
    fn descend(&mut self, start: usize, state: &F::State, totals: &[f64]) {
        for k in start..self.pool.len() {
            let e = self.pool[k];
            let costs = self.instance.costs(e);
            if !fits(totals, costs, self.budgets) {
                continue;
            }
            let v = self.eval.value_with(state, e);
            self.current.push(e);
            if v > self.best_value {
                self.best_value = v;
                self.best = self.current.clone();
            }
            let mut next = state.clone();
            self.eval.insert(&mut next, e);
            let next_totals: Vec<f64> = totals.iter().zip(costs).map(|(t, c)| t + c).collect();
            self.descend(k + 1, &next, &next_totals);
            self.current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Modular, WeightedCoverage};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abc() -> (Evaluator<Modular>, KnapsackInstance) {
        (
            Evaluator::new(Modular::new(vec![3.0, 2.0, 2.0])),
            KnapsackInstance::normalized_from_rows(vec![vec![2.0, 1.0, 1.0]], 2.0).unwrap(),
        )
    }

    #[test]
    fn greedy_example() {
        let (eval, inst) = abc();
        let s = offline_greedy(&eval, &inst, &[0, 1, 2], None);
        assert_eq!(s.elements, vec![1, 2]);
        assert_eq!(s.value, 4.0);
        let b = brute_force_opt(&eval, &inst, &[0, 1, 2], None).unwrap();
        assert_eq!(b.elements, vec![1, 2]);
        assert_eq!(b.value, 4.0);
    }

    #[test]
    fn greedy_degenerate_cases() {
        let eval = Evaluator::new(Modular::new(vec![5.0]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0]], 1.0).unwrap();
        assert_eq!(offline_greedy(&eval, &inst, &[0], None).elements, vec![0]);

        let zero = Evaluator::new(Modular::new(vec![0.0, 0.0]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0, 1.0]], 2.0).unwrap();
        let s = offline_greedy(&zero, &inst, &[0, 1], None);
        assert!(s.elements.is_empty() || s.value == 0.0);
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn greedy_falls_back_to_singleton() {
        // Density prefers the cheap element, which blocks the valuable one.
        let eval = Evaluator::new(Modular::new(vec![1.0, 10.0]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0, 10.0]], 10.0).unwrap();
        let s = offline_greedy(&eval, &inst, &[0, 1], None);
        assert_eq!(s.elements, vec![1]);
        assert_eq!(s.value, 10.0);
    }

    #[test]
    fn brute_force_examples() {
        let (eval, inst) = abc();
        let tight = inst.with_budget(0.5);
        let s = brute_force_opt(&eval, &tight, &[0, 1, 2], None).unwrap();
        assert!(s.elements.is_empty());
        let only = brute_force_opt(&eval, &inst, &[0], None).unwrap();
        assert_eq!(only.elements, vec![0]);
        let big: Vec<ElementId> = (0..21).collect();
        let eval = Evaluator::new(Modular::new(vec![1.0; 21]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0; 21]], 3.0).unwrap();
        assert!(matches!(
            brute_force_opt(&eval, &inst, &big, None),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn brute_force_ties_are_lexicographic() {
        let eval = Evaluator::new(Modular::new(vec![1.0, 1.0, 1.0]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0, 1.0, 1.0]], 2.0).unwrap();
        let s = brute_force_opt(&eval, &inst, &[2, 1, 0], None).unwrap();
        assert_eq!(s.elements, vec![0, 1]);
    }

    fn random_coverage(rng: &mut ChaCha8Rng, n: usize) -> WeightedCoverage {
        let universe = 12;
        let weights: Vec<f64> = (0..universe).map(|_| rng.gen_range(0.5..3.0)).collect();
        let sets = (0..n)
            .map(|_| (0..universe as u32).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        WeightedCoverage::new(weights, sets)
    }

    #[test]
    fn brute_force_matches_mask_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let eval = Evaluator::new(random_coverage(&mut rng, n));
            let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
            let k = rng.gen_range(1.0..8.0);
            let inst = KnapsackInstance::normalized_from_rows(vec![costs], k).unwrap();
            let ids: Vec<ElementId> = (0..n as ElementId).collect();
            let got = brute_force_opt(&eval, &inst, &ids, None).unwrap();
            let mut best = eval.evaluate(&[]);
            for mask in 0u32..(1 << n) {
                let set: Vec<ElementId> = ids.iter().copied().filter(|&e| mask >> e & 1 == 1).collect();
                if inst.cost_totals(&set)[0] <= k {
                    best = best.max(eval.evaluate(&set));
                }
            }
            assert!((got.value - best).abs() < 1e-9);
            assert!((eval.evaluate(&got.elements) - got.value).abs() < 1e-9);
        }
    }

    #[test]
    fn greedy_matches_plain_greedy_and_guarantee() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let factor = 0.5 * (1.0 - (-1.0f64).exp());
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let eval = Evaluator::new(random_coverage(&mut rng, n));
            let costs: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
            let k = rng.gen_range(1.0..8.0);
            let inst = KnapsackInstance::normalized_from_rows(vec![costs], k).unwrap();
            let ids: Vec<ElementId> = (0..n as ElementId).collect();
            let greedy = offline_greedy(&eval, &inst, &ids, None);
            assert!(greedy.fits(k));
            assert!((eval.evaluate(&greedy.elements) - greedy.value).abs() < 1e-9);
            let opt = brute_force_opt(&eval, &inst, &ids, None).unwrap();
            assert!(greedy.value >= factor * opt.value - 1e-9);

            // Plain (non-lazy) greedy picks the same set.
            let mut set: Vec<ElementId> = Vec::new();
            let mut cost = 0.0;
            loop {
                let base = eval.evaluate(&set);
                let mut pick: Option<(f64, ElementId)> = None;
                for &e in &ids {
                    if set.contains(&e) || cost + inst.costs(e)[0] > k {
                        continue;
                    }
                    let mut with = set.clone();
                    with.push(e);
                    let d = (eval.evaluate(&with) - base).max(0.0) / inst.costs(e)[0];
                    if pick.is_none_or(|(pd, _)| d > pd) {
                        pick = Some((d, e));
                    }
                }
                match pick {
                    Some((d, e)) if d > 0.0 => {
                        set.push(e);
                        cost += inst.costs(e)[0];
                    }
                    _ => break,
                }
            }
            let plain = eval.evaluate(&set);
            let single = ids
                .iter()
                .filter(|&&e| inst.costs(e)[0] <= k)
                .map(|&e| eval.evaluate(&[e]))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((greedy.value - plain.max(single)).abs() < 1e-9);
        }
    }
}
