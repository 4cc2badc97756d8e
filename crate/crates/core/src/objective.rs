//! Ground set, knapsack constraints and the oracle contract.
//!
//! Objectives implement [`SubmodularFn`], which works on an incremental
//! per-set state so that "value of `S ∪ {e}`" is a single oracle call when the
//! caller already holds the state of `S`. [`Evaluator`] wraps an objective and
//! counts every oracle call with an atomic counter, so it can be shared across
//! worker threads.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Index of an element in the ground set.
pub type ElementId = u32;

/// A monotone submodular set function with an incremental state.
///
/// `State` represents some set `S`; `value_with(state, e)` must equal
/// `f(S ∪ {e})` and must not depend on the order in which `S` was built.
pub trait SubmodularFn: Send + Sync {
    type State: Clone + Send + Sync;

    /// Number of elements in the ground set.
    fn ground_size(&self) -> usize;

    fn empty_state(&self) -> Self::State;

    fn state_value(&self, state: &Self::State) -> f64;

    /// `f(S ∪ {e})` where `state` represents `S`.
    fn value_with(&self, state: &Self::State, e: ElementId) -> f64;

    fn insert(&self, state: &mut Self::State, e: ElementId);

    fn build_state(&self, set: &[ElementId]) -> Self::State {
        let mut state = self.empty_state();
        for &e in set {
            self.insert(&mut state, e);
        }
        state
    }
}

/// Oracle wrapper that counts evaluations.
///
/// Every call that produces a function value (`evaluate`, `value_with`,
/// `empty_value`) counts as one oracle call. Building or extending a state is
/// bookkeeping and is not counted.
#[derive(Debug)]
pub struct Evaluator<F> {
    f: F,
    calls: AtomicU64,
}

impl<F: SubmodularFn> Evaluator<F> {
    pub fn new(f: F) -> Self {
        Self {
            f,
            calls: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &F {
        &self.f
    }

    pub fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    /// Number of oracle calls so far.
    pub fn eval_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn tick(&self) {
        self.calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn evaluate(&self, set: &[ElementId]) -> f64 {
        self.tick();
        self.f.state_value(&self.f.build_state(set))
    }

    pub fn empty_value(&self) -> f64 {
        self.tick();
        self.f.state_value(&self.f.empty_state())
    }

    pub fn empty_state(&self) -> F::State {
        self.f.empty_state()
    }

    pub fn build_state(&self, set: &[ElementId]) -> F::State {
        self.f.build_state(set)
    }

    /// `f(S ∪ {e})` for the set represented by `state`; one oracle call.
    pub fn value_with(&self, state: &F::State, e: ElementId) -> f64 {
        self.tick();
        self.f.value_with(state, e)
    }

    pub fn insert(&self, state: &mut F::State, e: ElementId) {
        self.f.insert(state, e);
    }

    /// Gain of `e` given a state whose value is already known.
    pub fn gain_from_state(&self, state: &F::State, state_value: f64, e: ElementId) -> f64 {
        (self.value_with(state, e) - state_value).max(0.0)
    }

    /// `f(S ∪ {e}) − f(S)`; two oracle calls.
    pub fn marginal_gain(&self, set: &[ElementId], e: ElementId) -> f64 {
        let state = self.f.build_state(set);
        self.tick();
        let base = self.f.state_value(&state);
        self.gain_from_state(&state, base, e)
    }

    /// `f(S ∪ {e}) − f(S)` with `f(S)` supplied by the caller; one oracle call.
    pub fn marginal_gain_cached(&self, set: &[ElementId], set_value: f64, e: ElementId) -> f64 {
        let state = self.f.build_state(set);
        self.gain_from_state(&state, set_value, e)
    }

    pub fn marginal_density(&self, set: &[ElementId], e: ElementId, cost: f64) -> Result<f64> {
        check_cost(cost)?;
        Ok(self.marginal_gain(set, e) / cost)
    }
}

fn check_cost(cost: f64) -> Result<()> {
    if cost > 0.0 && cost.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "marginal density needs a positive cost, got {cost}"
        )))
    }
}

/// Gain divided by cost. Multi-knapsack callers pass the largest
/// per-knapsack cost.
pub fn marginal_density(gain: f64, cost: f64) -> Result<f64> {
    check_cost(cost)?;
    Ok(gain / cost)
}

/// `d` knapsack constraints over `n` elements.
///
/// Costs are stored element-major so that the cost column of one element is
/// a contiguous slice.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackInstance {
    dims: usize,
    n: usize,
    costs: Vec<f64>,
    budgets: Vec<f64>,
    normalized: bool,
}

impl KnapsackInstance {
    /// Builds an instance from a `d × n` cost matrix (one row per knapsack)
    /// and a budget per row.
    pub fn new(cost_rows: Vec<Vec<f64>>, budgets: Vec<f64>) -> Result<Self> {
        let dims = cost_rows.len();
        if dims == 0 {
            return Err(Error::InvalidInstance("at least one knapsack".into()));
        }
        if budgets.len() != dims {
            return Err(Error::InvalidInstance(format!(
                "{} cost rows but {} budgets",
                dims,
                budgets.len()
            )));
        }
        let n = cost_rows[0].len();
        if cost_rows.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance("ragged cost matrix".into()));
        }
        let mut costs = vec![0.0; n * dims];
        for (a, row) in cost_rows.iter().enumerate() {
            for (e, &c) in row.iter().enumerate() {
                costs[e * dims + a] = c;
            }
        }
        let instance = Self {
            dims,
            n,
            costs,
            budgets,
            normalized: false,
        };
        instance.check_positive()?;
        Ok(instance)
    }

    /// Single knapsack.
    pub fn single(costs: Vec<f64>, budget: f64) -> Result<Self> {
        Self::new(vec![costs], vec![budget])
    }

    /// Builds an instance that is already normalized: every budget equals `k`
    /// and every cost entry is at least one.
    pub fn normalized_from_rows(cost_rows: Vec<Vec<f64>>, k: f64) -> Result<Self> {
        let dims = cost_rows.len();
        let mut instance = Self::new(cost_rows, vec![k; dims])?;
        if instance.costs.iter().any(|&c| c < 1.0) {
            return Err(Error::InvalidInstance(
                "normalized instances need every cost ≥ 1".into(),
            ));
        }
        instance.normalized = true;
        Ok(instance)
    }

    fn check_positive(&self) -> Result<()> {
        if let Some(c) = self.costs.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidInstance(format!("cost entry {c} is not positive")));
        }
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidInstance(format!("budget {b} is not positive")));
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    /// The common budget `K` of a normalized instance (the first budget
    /// otherwise).
    pub fn budget(&self) -> f64 {
        self.budgets[0]
    }

    /// Cost column of element `e`.
    pub fn costs(&self, e: ElementId) -> &[f64] {
        let e = e as usize;
        &self.costs[e * self.dims..(e + 1) * self.dims]
    }

    /// Largest per-knapsack cost of `e`.
    pub fn max_cost(&self, e: ElementId) -> f64 {
        self.costs(e).iter().copied().fold(f64::MIN, f64::max)
    }

    /// Cost row of knapsack `a`.
    pub fn cost_row(&self, a: usize) -> Vec<f64> {
        (0..self.n).map(|e| self.costs[e * self.dims + a]).collect()
    }

    pub fn cost_totals(&self, set: &[ElementId]) -> Vec<f64> {
        let mut totals = vec![0.0; self.dims];
        for &e in set {
            for (t, c) in totals.iter_mut().zip(self.costs(e)) {
                *t += c;
            }
        }
        totals
    }

    /// Whether `e` fits the knapsacks on its own. Elements that do not are
    /// dropped at ingest.
    pub fn admissible(&self, e: ElementId) -> bool {
        self.costs(e)
            .iter()
            .zip(&self.budgets)
            .all(|(c, b)| c <= b)
    }

    /// Admissible elements in index order: the stream the algorithms see.
    pub fn stream(&self) -> Vec<ElementId> {
        (0..self.n as ElementId).filter(|&e| self.admissible(e)).collect()
    }

    fn check_ids(&self, set: &[ElementId]) -> Result<()> {
        match set.iter().find(|&&e| e as usize >= self.n) {
            Some(e) => Err(Error::InvalidArgument(format!(
                "element {e} is outside a ground set of size {}",
                self.n
            ))),
            None => Ok(()),
        }
    }

    /// Restriction to the listed elements, renumbered `0..ids.len()`.
    pub fn restrict(&self, ids: &[ElementId]) -> Result<Self> {
        self.check_ids(ids)?;
        let mut costs = Vec::with_capacity(ids.len() * self.dims);
        for &e in ids {
            costs.extend_from_slice(self.costs(e));
        }
        Ok(Self {
            dims: self.dims,
            n: ids.len(),
            costs,
            budgets: self.budgets.clone(),
            normalized: self.normalized,
        })
    }

    pub fn with_budget(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.budgets = vec![k; self.dims];
        out
    }
}

/// Rescales an instance so every budget equals a common `K` and the smallest
/// cost entry is one. Feasibility of every set is preserved.
pub fn normalize(instance: &KnapsackInstance) -> Result<KnapsackInstance> {
    instance.check_positive()?;
    if instance.normalized {
        return Ok(instance.clone());
    }
    let dims = instance.dims;
    let first = instance.budgets[0];
    let mut costs = instance.costs.clone();
    for e in 0..instance.n {
        for a in 1..dims {
            costs[e * dims + a] *= first / instance.budgets[a];
        }
    }
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let (costs, k) = if min.is_finite() {
        (costs.iter().map(|c| c / min).collect(), first / min)
    } else {
        (costs, first)
    };
    Ok(KnapsackInstance {
        dims,
        n: instance.n,
        costs,
        budgets: vec![k; dims],
        normalized: true,
    })
}

/// True iff every coordinate of the summed cost vector of `set` is within
/// its budget.
pub fn is_feasible(instance: &KnapsackInstance, set: &[ElementId]) -> Result<bool> {
    instance.check_ids(set)?;
    Ok(instance
        .cost_totals(set)
        .iter()
        .zip(&instance.budgets)
        .all(|(t, b)| t <= b))
}

/// A feasible set with its cached value and per-knapsack cost totals.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub elements: Vec<ElementId>,
    pub value: f64,
    pub cost_totals: Vec<f64>,
}

impl Solution {
    /// Evaluates `elements` (one oracle call) and sums their costs.
    pub fn evaluate<F: SubmodularFn>(
        eval: &Evaluator<F>,
        instance: &KnapsackInstance,
        mut elements: Vec<ElementId>,
    ) -> Self {
        elements.sort_unstable();
        let value = eval.evaluate(&elements);
        let cost_totals = instance.cost_totals(&elements);
        Self {
            elements,
            value,
            cost_totals,
        }
    }

    pub fn empty<F: SubmodularFn>(eval: &Evaluator<F>, instance: &KnapsackInstance) -> Self {
        Self {
            elements: Vec::new(),
            value: eval.empty_value(),
            cost_totals: vec![0.0; instance.dims()],
        }
    }

    pub fn fits(&self, budget: f64) -> bool {
        self.cost_totals.iter().all(|&t| t <= budget)
    }

    /// Total cost in the first knapsack.
    pub fn cost(&self) -> f64 {
        self.cost_totals.first().copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Modular, WeightedCoverage};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_single_row() {
        let inst = KnapsackInstance::single(vec![2.0, 4.0], 8.0).unwrap();
        let norm = normalize(&inst).unwrap();
        assert_eq!(norm.cost_row(0), vec![1.0, 2.0]);
        assert_eq!(norm.budget(), 4.0);
        assert!(norm.is_normalized());
    }

    #[test]
    fn normalize_rescales_rows_to_first_budget() {
        let inst =
            KnapsackInstance::new(vec![vec![1.0, 2.0], vec![2.0, 2.0]], vec![4.0, 8.0]).unwrap();
        let norm = normalize(&inst).unwrap();
        assert_eq!(norm.cost_row(0), vec![1.0, 2.0]);
        assert_eq!(norm.cost_row(1), vec![1.0, 1.0]);
        assert_eq!(norm.budgets(), &[4.0, 4.0]);
    }

    #[test]
    fn normalize_is_identity_on_normalized() {
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0, 3.0]], 5.0).unwrap();
        assert_eq!(normalize(&inst).unwrap(), inst);
        let once = normalize(&KnapsackInstance::single(vec![3.0, 6.0], 9.0).unwrap()).unwrap();
        assert_eq!(normalize(&once).unwrap(), once);
    }

    #[test]
    fn rejects_nonpositive_entries() {
        assert!(matches!(
            KnapsackInstance::single(vec![1.0, 0.0], 3.0),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            KnapsackInstance::single(vec![1.0], -1.0),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn feasibility_examples() {
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![2.0, 3.0]], 4.0).unwrap();
        assert!(is_feasible(&inst, &[]).unwrap());
        assert!(!is_feasible(&inst, &[0, 1]).unwrap());
        let two =
            KnapsackInstance::normalized_from_rows(vec![vec![1.0, 2.0], vec![3.0, 1.0]], 4.0)
                .unwrap();
        assert!(is_feasible(&two, &[0, 1]).unwrap());
        assert!(matches!(
            is_feasible(&two, &[7]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn normalization_preserves_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=12);
            let rows: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..n).map(|_| rng.gen_range(0.1..5.0)).collect())
                .collect();
            let budgets: Vec<f64> = (0..d).map(|_| rng.gen_range(1.0..12.0)).collect();
            let inst = KnapsackInstance::new(rows, budgets).unwrap();
            let norm = normalize(&inst).unwrap();
            let min = (0..n as ElementId)
                .flat_map(|e| norm.costs(e).to_vec())
                .fold(f64::INFINITY, f64::min);
            assert!((min - 1.0).abs() < 1e-12);
            for _ in 0..200 {
                let set: Vec<ElementId> =
                    (0..n as ElementId).filter(|_| rng.gen_bool(0.4)).collect();
                let before = is_feasible(&inst, &set).unwrap();
                let after = is_feasible(&norm, &set).unwrap();
                // Sets sitting exactly on a budget can flip by one ulp.
                let totals = inst.cost_totals(&set);
                let on_edge = totals
                    .iter()
                    .zip(inst.budgets())
                    .any(|(t, b)| ((t - b) / b).abs() < 1e-12);
                if !on_edge {
                    assert_eq!(before, after, "set {set:?}");
                }
            }
        }
    }

    #[test]
    fn gain_examples() {
        let eval = Evaluator::new(Modular::new(vec![3.0, 2.0]));
        assert_eq!(eval.marginal_gain(&[], 0), 3.0);
        assert_eq!(eval.marginal_gain(&[0], 0), 0.0);

        let cover = Evaluator::new(WeightedCoverage::unit(3, vec![vec![0, 1], vec![1, 2]]));
        assert_eq!(cover.marginal_gain(&[0], 1), 1.0);
    }

    #[test]
    fn gain_call_accounting() {
        let eval = Evaluator::new(Modular::new(vec![3.0, 2.0, 1.0]));
        eval.marginal_gain(&[0], 1);
        assert_eq!(eval.eval_count(), 2);
        let f0 = eval.evaluate(&[0]);
        assert_eq!(eval.eval_count(), 3);
        assert_eq!(eval.marginal_gain_cached(&[0], f0, 2), 1.0);
        assert_eq!(eval.eval_count(), 4);
    }

    #[test]
    fn density_examples() {
        assert_eq!(marginal_density(3.0, 2.0).unwrap(), 1.5);
        assert_eq!(marginal_density(6.0, 3.0).unwrap(), 2.0);
        assert!(matches!(
            marginal_density(1.0, 0.0),
            Err(Error::InvalidArgument(_))
        ));
        let eval = Evaluator::new(Modular::new(vec![3.0]));
        assert_eq!(eval.marginal_density(&[0], 0, 5.0).unwrap(), 0.0);
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![1.0], vec![3.0]], 4.0).unwrap();
        let eval = Evaluator::new(Modular::new(vec![6.0]));
        assert_eq!(eval.marginal_density(&[], 0, inst.max_cost(0)).unwrap(), 2.0);
    }
}
