//! The partition/bucket grid.
//!
//! Partition `i` holds buckets of capacity `2^{i+1}` (or `2·t_i` for the
//! size-bounded variant) and accepts an element when its marginal density
//! with respect to a bucket reaches a threshold that halves from one
//! partition to the next. Elements are placed first-fit: lowest partition,
//! then lowest bucket. Partitions whose counters overflow append fresh empty
//! buckets until the partition holds `10·w·2^i` elements.
//!
//! A first-fit grid keeps the non-empty buckets of each partition as a
//! prefix: an element only lands past an empty bucket if that empty bucket
//! rejected it, and every empty bucket of a partition answers the same way.
//! [`BucketGrid::locate`] relies on this and tests one empty bucket per
//! partition instead of all of them.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, SubmodularFn};

use super::summary::{RobustSummary, SummaryEntry};

/// Which grid rules apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Robust to `m` removed items, one knapsack.
    Num,
    /// Robust to removals of total cost at most `M`, one knapsack, fixed
    /// bucket count.
    Size,
    /// Robust to `m` removed items, `d` knapsacks.
    Mult,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Num => "algnum",
            Algorithm::Size => "algsize",
            Algorithm::Mult => "algmult",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "algnum" => Some(Algorithm::Num),
            "algsize" => Some(Algorithm::Size),
            "algmult" => Some(Algorithm::Mult),
            _ => None,
        }
    }
}

/// `⌈log₂ k⌉` for `k ≥ 1`.
pub fn ceil_log2(k: f64) -> usize {
    let mut levels = 0;
    while 2f64.powi(levels as i32) < k {
        levels += 1;
    }
    levels
}

fn pow2(i: i32) -> f64 {
    2f64.powi(i)
}

/// Parameters shared by every partition of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridParams {
    pub algorithm: Algorithm,
    pub dims: usize,
    /// `m` (number of removals) or, for [`Algorithm::Size`], `M` (total
    /// removed cost).
    pub removals: f64,
    pub budget: f64,
    /// Estimate of the optimum this grid was built for.
    pub tau_star: f64,
    /// `ℓ = ⌈log₂ K⌉`.
    pub levels: usize,
    /// `w = ⌈4ℓm/K⌉`, at least one for [`Algorithm::Size`].
    pub width: usize,
    /// Working threshold `τ` derived from `tau_star`.
    pub tau: f64,
}

impl GridParams {
    fn base(algorithm: Algorithm, dims: usize, removals: f64, budget: f64) -> Result<Self> {
        if !(budget >= 1.0) || !budget.is_finite() {
            return Err(Error::InvalidArgument(format!("budget must be ≥ 1, got {budget}")));
        }
        if !(removals >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "removal bound must be ≥ 0, got {removals}"
            )));
        }
        if dims == 0 {
            return Err(Error::InvalidArgument("at least one knapsack".into()));
        }
        let levels = ceil_log2(budget);
        let mut width = (4.0 * levels as f64 * removals / budget).ceil() as usize;
        if algorithm == Algorithm::Size {
            // With `M = 0` the formula leaves the size grid without buckets.
            width = width.max(1);
        }
        Ok(Self {
            algorithm,
            dims,
            removals,
            budget,
            tau_star: 0.0,
            levels,
            width,
            tau: 0.0,
        })
    }

    fn check_tau(tau: f64) -> Result<()> {
        if tau > 0.0 && tau.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("threshold estimate must be positive, got {tau}")))
        }
    }

    /// Single-knapsack grid robust to `m` removals; `τ = 2τ*/(32ζ + 3)` with
    /// `ζ = 1 − 1/(2ℓ)`.
    pub fn num(m: usize, budget: f64, tau_star: f64) -> Result<Self> {
        Self::check_tau(tau_star)?;
        let mut p = Self::base(Algorithm::Num, 1, m as f64, budget)?;
        p.tau_star = tau_star;
        p.tau = 2.0 * tau_star / (32.0 * zeta(p.levels) + 3.0);
        Ok(p)
    }

    /// `d`-knapsack grid robust to `m` removals; `τ = τ*/4`.
    pub fn mult(dims: usize, m: usize, budget: f64, tau_star: f64) -> Result<Self> {
        Self::check_tau(tau_star)?;
        let mut p = Self::base(Algorithm::Mult, dims, m as f64, budget)?;
        p.tau_star = tau_star;
        p.tau = tau_star / 4.0;
        Ok(p)
    }

    /// Size-bounded grid with working threshold `τ` given directly.
    pub fn size(max_removed_cost: f64, budget: f64, tau: f64) -> Result<Self> {
        Self::check_tau(tau)?;
        let mut p = Self::base(Algorithm::Size, 1, max_removed_cost, budget)?;
        p.tau = tau;
        p.tau_star = tau * p.size_divisor();
        Ok(p)
    }

    /// Size-bounded grid for an estimate `τ*` of the optimum:
    /// `τ = τ*/(13 − 11η)`, `η = 4M/(wK)`.
    pub fn size_from_estimate(max_removed_cost: f64, budget: f64, tau_star: f64) -> Result<Self> {
        Self::check_tau(tau_star)?;
        let mut p = Self::base(Algorithm::Size, 1, max_removed_cost, budget)?;
        p.tau_star = tau_star;
        p.tau = tau_star / p.size_divisor();
        Ok(p)
    }

    /// Same rules with a different estimate.
    pub fn with_tau_star(&self, tau_star: f64) -> Result<Self> {
        match self.algorithm {
            Algorithm::Num => Self::num(self.removals as usize, self.budget, tau_star),
            Algorithm::Mult => Self::mult(self.dims, self.removals as usize, self.budget, tau_star),
            Algorithm::Size => Self::size_from_estimate(self.removals, self.budget, tau_star),
        }
    }

    /// `η = 4M/(wK)`, zero when `w = 0`.
    pub fn eta(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            4.0 * self.removals / (self.width as f64 * self.budget)
        }
    }

    fn size_divisor(&self) -> f64 {
        13.0 - 11.0 * self.eta()
    }

    pub fn partition_count(&self) -> usize {
        self.levels + 1
    }

    /// Initial bucket count of partition `i`.
    pub fn initial_buckets(&self, i: usize) -> usize {
        let base = self.width * (self.budget / pow2(i as i32)).ceil() as usize;
        match self.algorithm {
            Algorithm::Num | Algorithm::Mult => base + 8 * self.levels,
            Algorithm::Size => base,
        }
    }

    /// `t_i = min{2^i, K}` (size-bounded grid).
    pub fn size_target(&self, i: usize) -> f64 {
        pow2(i as i32).min(self.budget)
    }

    /// Density an element needs to enter partition `i`.
    pub fn threshold(&self, i: usize) -> f64 {
        match self.algorithm {
            Algorithm::Num => self.tau / pow2(i as i32),
            Algorithm::Mult => self.tau / (pow2(i as i32) * (1.0 + 2.0 * self.dims as f64)),
            Algorithm::Size => self.tau / self.size_target(i),
        }
    }

    /// Smallest threshold over all partitions.
    pub fn min_threshold(&self) -> f64 {
        (0..self.partition_count())
            .map(|i| self.threshold(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest element cost partition `i` admits.
    pub fn cost_cap(&self, i: usize) -> f64 {
        let half = pow2(i as i32 - 1);
        match self.algorithm {
            Algorithm::Num | Algorithm::Mult => half,
            Algorithm::Size => half.min(self.budget),
        }
    }

    /// Bucket capacity of partition `i`.
    pub fn capacity(&self, i: usize) -> f64 {
        match self.algorithm {
            Algorithm::Num | Algorithm::Mult => pow2(i as i32 + 1),
            Algorithm::Size => 2.0 * self.size_target(i),
        }
    }

    /// Element count after which partition `i` stops growing: `10·w·2^i`.
    pub fn element_cap(&self, i: usize) -> f64 {
        10.0 * self.width as f64 * pow2(i as i32)
    }

    /// The cost used for densities and partition eligibility: the single
    /// cost, or the largest per-knapsack cost.
    pub fn element_cost(&self, costs: &[f64]) -> f64 {
        match self.algorithm {
            Algorithm::Mult => costs.iter().copied().fold(f64::MIN, f64::max),
            _ => costs[0],
        }
    }

    fn counter_dims(&self) -> usize {
        match self.algorithm {
            Algorithm::Num => 1,
            Algorithm::Mult => self.dims,
            Algorithm::Size => 0,
        }
    }

    /// Whether a bucket with the given totals still takes `costs`.
    pub fn fits(&self, i: usize, totals: &[f64], costs: &[f64]) -> bool {
        let cap = self.capacity(i);
        match self.algorithm {
            Algorithm::Num => totals[0] + costs[0] <= cap,
            Algorithm::Mult => totals.iter().zip(costs).all(|(t, c)| t + c < cap),
            Algorithm::Size => totals[0] + costs[0] < cap,
        }
    }

    /// Saturation of a bucket of partition `i` with respect to knapsack `a`.
    pub fn is_saturated(&self, i: usize, totals: &[f64], a: usize) -> bool {
        let level = match self.algorithm {
            Algorithm::Num => pow2(i as i32),
            Algorithm::Mult | Algorithm::Size => pow2(i as i32).min(self.budget),
        };
        totals[a] >= level
    }
}

fn zeta(levels: usize) -> f64 {
    1.0 - 1.0 / (2.0 * levels.max(1) as f64)
}

/// One bucket `B_{i,j}`.
#[derive(Clone, Debug)]
pub struct Bucket<S> {
    elements: Vec<ElementId>,
    element_costs: Vec<Vec<f64>>,
    cost_totals: Vec<f64>,
    value: f64,
    state: Option<S>,
    insertion_log: Vec<(ElementId, f64)>,
}

impl<S> Bucket<S> {
    fn empty(dims: usize) -> Self {
        Self {
            elements: Vec::new(),
            element_costs: Vec::new(),
            cost_totals: vec![0.0; dims],
            value: 0.0,
            state: None,
            insertion_log: Vec::new(),
        }
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    /// Cost columns of the members, aligned with [`Bucket::elements`].
    pub fn element_costs(&self) -> &[Vec<f64>] {
        &self.element_costs
    }

    pub fn cost_totals(&self) -> &[f64] {
        &self.cost_totals
    }

    /// Cached `f(B)`.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// `(element, density at insertion)` in insertion order.
    pub fn insertion_log(&self) -> &[(ElementId, f64)] {
        &self.insertion_log
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Partition `i` of the grid.
#[derive(Clone, Debug)]
pub struct Partition<S> {
    index: usize,
    buckets: Vec<Bucket<S>>,
    /// Non-empty buckets form the prefix `0..filled`.
    filled: usize,
    counters: Vec<f64>,
    element_count: usize,
}

impl<S> Partition<S> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn buckets(&self) -> &[Bucket<S>] {
        &self.buckets
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn counters(&self) -> &[f64] {
        &self.counters
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }
}

/// Where an offered element ended up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Placement {
    Placed { partition: usize, bucket: usize },
    Rejected,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    partition: usize,
    bucket: usize,
    new_value: f64,
    density: f64,
}

/// All partitions `0..=ℓ` built for one estimate of the optimum.
#[derive(Clone, Debug)]
pub struct BucketGrid<S> {
    params: GridParams,
    partitions: Vec<Partition<S>>,
    empty_state: S,
    empty_value: f64,
    members: HashSet<ElementId>,
}

impl<S: Clone> BucketGrid<S> {
    /// Fresh grid: `n_i` empty buckets per partition, zero counters.
    pub fn new<F: SubmodularFn<State = S>>(params: GridParams, eval: &Evaluator<F>) -> Self {
        let empty_state = eval.empty_state();
        let empty_value = eval.inner().state_value(&empty_state);
        let partitions = (0..params.partition_count())
            .map(|i| Partition {
                index: i,
                buckets: (0..params.initial_buckets(i))
                    .map(|_| Bucket::empty(params.dims))
                    .collect(),
                filled: 0,
                counters: vec![0.0; params.counter_dims()],
                element_count: 0,
            })
            .collect();
        Self {
            params,
            partitions,
            empty_state,
            empty_value,
            members: HashSet::new(),
        }
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn partitions(&self) -> &[Partition<S>] {
        &self.partitions
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.members.contains(&e)
    }

    pub fn element_count(&self) -> usize {
        self.members.len()
    }

    fn check_dims(&self, costs: &[f64]) -> Result<()> {
        let expected = self.params.dims;
        if costs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{} grid expects {} cost entries, got {}",
                self.params.algorithm.name(),
                expected,
                costs.len()
            )));
        }
        Ok(())
    }

    fn locate<F: SubmodularFn<State = S>>(
        &self,
        eval: &Evaluator<F>,
        e: ElementId,
        costs: &[f64],
    ) -> Option<Slot> {
        let cost = self.params.element_cost(costs);
        let mut singleton: Option<f64> = None;
        for part in &self.partitions {
            let i = part.index;
            if cost > self.params.cost_cap(i) {
                continue;
            }
            let threshold = self.params.threshold(i);
            for (j, bucket) in part.buckets[..part.filled].iter().enumerate() {
                // Capacity first: it is free, the gain costs an oracle call.
                if !self.params.fits(i, &bucket.cost_totals, costs) {
                    continue;
                }
                let state = bucket.state.as_ref().expect("filled bucket has a state");
                let new_value = eval.value_with(state, e);
                let density = (new_value - bucket.value).max(0.0) / cost;
                if density >= threshold {
                    return Some(Slot {
                        partition: i,
                        bucket: j,
                        new_value,
                        density,
                    });
                }
            }
            if part.filled < part.buckets.len() {
                let new_value =
                    *singleton.get_or_insert_with(|| eval.value_with(&self.empty_state, e));
                let density = (new_value - self.empty_value).max(0.0) / cost;
                if density >= threshold {
                    return Some(Slot {
                        partition: i,
                        bucket: part.filled,
                        new_value,
                        density,
                    });
                }
            }
        }
        None
    }

    /// Bucket the element would be placed into, without changing the grid.
    /// Elements already in the grid are never re-placed.
    pub fn would_accept<F: SubmodularFn<State = S>>(
        &self,
        eval: &Evaluator<F>,
        e: ElementId,
        costs: &[f64],
    ) -> Result<Option<(usize, usize)>> {
        self.check_dims(costs)?;
        if self.contains(e) {
            return Ok(None);
        }
        Ok(self.locate(eval, e, costs).map(|s| (s.partition, s.bucket)))
    }

    /// Offers one stream element. Returns where it was placed.
    pub fn offer<F: SubmodularFn<State = S>>(
        &mut self,
        eval: &Evaluator<F>,
        e: ElementId,
        costs: &[f64],
    ) -> Result<Placement> {
        self.check_dims(costs)?;
        if self.contains(e) {
            return Err(Error::InvalidArgument(format!(
                "element {e} was already streamed into this grid"
            )));
        }
        let Some(slot) = self.locate(eval, e, costs) else {
            return Ok(Placement::Rejected);
        };
        let params = &self.params;
        let levels = params.levels as f64;
        let i = slot.partition;
        let part = &mut self.partitions[i];
        let bucket = &mut part.buckets[slot.bucket];
        let state = bucket.state.get_or_insert_with(|| self.empty_state.clone());
        eval.insert(state, e);
        bucket.value = slot.new_value;
        bucket.elements.push(e);
        bucket.element_costs.push(costs.to_vec());
        bucket.insertion_log.push((e, slot.density));
        for (t, c) in bucket.cost_totals.iter_mut().zip(costs) {
            *t += c;
        }
        if slot.bucket == part.filled {
            part.filled += 1;
        }
        part.element_count += 1;
        self.members.insert(e);

        let unit = pow2(i as i32);
        let below_cap = (part.element_count as f64) < params.element_cap(i);
        match params.algorithm {
            Algorithm::Num => {
                part.counters[0] += 8.0 * levels * costs[0];
                if below_cap {
                    while part.counters[0] >= unit {
                        part.buckets.push(Bucket::empty(params.dims));
                        part.counters[0] -= unit;
                    }
                }
            }
            Algorithm::Mult => {
                for (s, c) in part.counters.iter_mut().zip(costs) {
                    *s += 8.0 * levels * c;
                }
                while below_cap && part.counters.iter().any(|&s| s >= unit) {
                    part.buckets.push(Bucket::empty(params.dims));
                    for s in &mut part.counters {
                        *s = (*s - unit).max(0.0);
                    }
                }
            }
            Algorithm::Size => {}
        }
        Ok(Placement::Placed {
            partition: i,
            bucket: slot.bucket,
        })
    }

    /// Flattened summary with bucket provenance.
    pub fn summary(&self) -> RobustSummary {
        let mut entries = Vec::with_capacity(self.members.len());
        for part in &self.partitions {
            for (j, bucket) in part.buckets[..part.filled].iter().enumerate() {
                for (&e, costs) in bucket.elements.iter().zip(&bucket.element_costs) {
                    entries.push(SummaryEntry {
                        element: e,
                        partition: part.index,
                        bucket: j,
                        costs: costs.clone(),
                    });
                }
            }
        }
        RobustSummary {
            tau_star: self.params.tau_star,
            partition_count: self.params.partition_count(),
            entries,
        }
    }

    /// Exact structural snapshot: per partition, per bucket, element order,
    /// plus the counters.
    pub fn snapshot(&self) -> GridSnapshot {
        GridSnapshot {
            partitions: self
                .partitions
                .iter()
                .map(|p| PartitionSnapshot {
                    buckets: p.buckets.iter().map(|b| b.elements.clone()).collect(),
                    counters: p.counters.clone(),
                })
                .collect(),
        }
    }

    /// Fraction of saturated buckets of partition `i` with respect to
    /// knapsack `a`.
    pub fn saturated_fraction(&self, i: usize, a: usize) -> f64 {
        let part = &self.partitions[i];
        if part.buckets.is_empty() {
            return 0.0;
        }
        let saturated = part
            .buckets
            .iter()
            .filter(|b| self.params.is_saturated(i, &b.cost_totals, a))
            .count();
        saturated as f64 / part.buckets.len() as f64
    }

    /// Audits the structural invariants: capacities, cost caps, entry
    /// densities, uniqueness, counter draining and the filled-prefix layout.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let p = &self.params;
        let mut seen = HashSet::new();
        for part in &self.partitions {
            let i = part.index;
            if part.buckets.len() < p.initial_buckets(i) {
                return Err(format!("partition {i} shrank below its initial size"));
            }
            if p.algorithm == Algorithm::Size && part.buckets.len() != p.initial_buckets(i) {
                return Err(format!("size-bounded partition {i} grew"));
            }
            let mut count = 0;
            for (j, bucket) in part.buckets.iter().enumerate() {
                count += bucket.elements.len();
                if (j < part.filled) == bucket.elements.is_empty() {
                    return Err(format!("bucket ({i},{j}) breaks the filled-prefix layout"));
                }
                let cap = p.capacity(i);
                let over = match p.algorithm {
                    Algorithm::Num => bucket.cost_totals[0] > cap,
                    Algorithm::Mult | Algorithm::Size => bucket.cost_totals.iter().any(|&t| t >= cap),
                };
                if over {
                    return Err(format!(
                        "bucket ({i},{j}) totals {:?} exceed capacity {cap}",
                        bucket.cost_totals
                    ));
                }
                let threshold = p.threshold(i);
                let mut totals = vec![0.0; p.dims];
                for (costs, &(e, density)) in bucket.element_costs.iter().zip(&bucket.insertion_log) {
                    if !seen.insert(e) {
                        return Err(format!("element {e} placed twice"));
                    }
                    for (t, c) in totals.iter_mut().zip(costs) {
                        *t += c;
                    }
                    let c = p.element_cost(costs);
                    if c > p.cost_cap(i) {
                        return Err(format!("element {e} of cost {c} in partition {i}"));
                    }
                    if density < threshold {
                        return Err(format!(
                            "element {e} entered ({i},{j}) at density {density} < {threshold}"
                        ));
                    }
                }
                if totals != bucket.cost_totals {
                    return Err(format!("bucket ({i},{j}) cost totals drifted"));
                }
            }
            if count != part.element_count {
                return Err(format!("partition {i} element count drifted"));
            }
            if p.algorithm != Algorithm::Size
                && (count as f64) < p.element_cap(i)
                && part.counters.iter().any(|&s| s >= pow2(i as i32))
            {
                return Err(format!(
                    "partition {i} has undrained counters {:?}",
                    part.counters
                ));
            }
        }
        if seen.len() != self.members.len() {
            return Err("membership index out of sync".into());
        }
        Ok(())
    }
}

/// Structural copy of a grid used for exact equality checks.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSnapshot {
    pub partitions: Vec<PartitionSnapshot>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSnapshot {
    pub buckets: Vec<Vec<ElementId>>,
    pub counters: Vec<f64>,
}

impl GridSnapshot {
    pub fn element_count(&self) -> usize {
        self.partitions
            .iter()
            .flat_map(|p| &p.buckets)
            .map(Vec::len)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Modular;

    fn modular(weights: &[f64]) -> Evaluator<Modular> {
        Evaluator::new(Modular::new(weights.to_vec()))
    }

    #[test]
    fn num_parameters() {
        let p = GridParams::num(4, 8.0, 89.0).unwrap();
        assert_eq!(p.levels, 3);
        assert!((p.tau - 6.0).abs() < 1e-12);
        assert_eq!(p.width, 6);
        assert_eq!(p.initial_buckets(0), 72);
        assert_eq!(p.initial_buckets(3), 30);
        let p = GridParams::num(0, 8.0, 89.0).unwrap();
        assert_eq!(p.width, 0);
        assert!((0..=3).all(|i| p.initial_buckets(i) == 24));
        assert!(matches!(
            GridParams::num(1, 0.5, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(GridParams::num(1, 8.0, 0.0).is_err());
    }

    #[test]
    fn size_parameters() {
        let p = GridParams::size(8.0, 8.0, 1.0).unwrap();
        assert_eq!(p.width, 12);
        assert_eq!(p.initial_buckets(0), 96);
        assert_eq!(p.initial_buckets(3), 12);
        assert!((p.eta() - 1.0 / 3.0).abs() < 1e-15);
        let q = GridParams::size_from_estimate(8.0, 8.0, 28.0).unwrap();
        assert!((q.tau - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mult_parameters() {
        let p = GridParams::mult(2, 1, 8.0, 8.0).unwrap();
        assert_eq!(p.tau, 2.0);
        assert_eq!(p.element_cost(&[1.0, 3.0]), 3.0);
        let first = (0..p.partition_count()).find(|&i| 3.0 <= p.cost_cap(i));
        assert_eq!(first, Some(3));
    }

    #[test]
    fn num_insert_example() {
        let eval = modular(&[7.0]);
        let p = GridParams::num(4, 8.0, 89.0).unwrap();
        let mut grid = BucketGrid::new(p, &eval);
        let placed = grid.offer(&eval, 0, &[1.0]).unwrap();
        assert_eq!(placed, Placement::Placed { partition: 1, bucket: 0 });
        let part = &grid.partitions()[1];
        assert_eq!(part.bucket_count(), 48 + 12);
        assert_eq!(part.counters(), &[0.0]);
        assert!(grid.partitions()[0].element_count() == 0);
        grid.check_invariants().unwrap();
    }

    #[test]
    fn low_gain_is_rejected_without_change() {
        let eval = modular(&[0.001]);
        let p = GridParams::num(2, 8.0, 89.0).unwrap();
        let mut grid = BucketGrid::new(p, &eval);
        let before = grid.snapshot();
        assert_eq!(grid.offer(&eval, 0, &[1.0]).unwrap(), Placement::Rejected);
        assert_eq!(grid.snapshot(), before);
    }

    #[test]
    fn rejects_wrong_dimension_and_repeats() {
        let eval = modular(&[5.0]);
        let mut grid = BucketGrid::new(GridParams::num(1, 8.0, 10.0).unwrap(), &eval);
        assert!(matches!(
            grid.offer(&eval, 0, &[1.0, 1.0]),
            Err(Error::InvalidArgument(_))
        ));
        grid.offer(&eval, 0, &[1.0]).unwrap();
        assert!(grid.offer(&eval, 0, &[1.0]).is_err());
        assert_eq!(grid.would_accept(&eval, 0, &[1.0]).unwrap(), None);
    }

    #[test]
    fn would_accept_matches_offer() {
        let eval = modular(&[4.0, 3.0, 0.5, 6.0, 2.0]);
        let mut grid = BucketGrid::new(GridParams::mult(1, 1, 8.0, 12.0).unwrap(), &eval);
        for (e, c) in [(0, 1.0), (1, 2.0), (2, 1.0), (3, 4.0), (4, 1.5)] {
            let dry = grid.would_accept(&eval, e, &[c]).unwrap();
            let real = grid.offer(&eval, e, &[c]).unwrap();
            match real {
                Placement::Placed { partition, bucket } => assert_eq!(dry, Some((partition, bucket))),
                Placement::Rejected => assert_eq!(dry, None),
            }
        }
        grid.check_invariants().unwrap();
    }

    #[test]
    fn saturation_classifier() {
        let p = GridParams::num(1, 8.0, 10.0).unwrap();
        assert!(p.is_saturated(2, &[4.0], 0));
        assert!(!p.is_saturated(2, &[3.5], 0));
        let s = GridParams::size(1.0, 5.0, 1.0).unwrap();
        assert!(s.is_saturated(3, &[5.0], 0));
    }

    #[test]
    fn one_oracle_call_per_bucket_test() {
        let eval = modular(&[7.0]);
        let grid = BucketGrid::new(GridParams::num(4, 8.0, 89.0).unwrap(), &eval);
        eval.reset_count();
        grid.would_accept(&eval, 0, &[1.0]).unwrap();
        // Every partition tests its first (empty) bucket with one shared call.
        assert_eq!(eval.eval_count(), 1);
    }
}
