//! Geometric ladder of optimum estimates `τ* = (1+ε)^j`, one sketch each.
//!
//! Sketches are created lazily and never lose information relative to a
//! sketch that watched the whole stream:
//!
//! * Upper side: a sketch whose smallest entry threshold exceeds every
//!   singleton gain seen so far would have rejected every earlier element
//!   (costs are at least one and gains only shrink), so it is created only
//!   once the running maximum reaches that threshold.
//! * Lower side: the anchor `lo` is the `r`-th largest positive singleton
//!   gain, where `r` is the removal rank of the factory (`m + 1` for `m`
//!   removals). After any admissible removal some element of value `≥ lo`
//!   survives, so estimates below `lo/(1+ε)` are not needed for removals
//!   within the bound; their sketches are frozen (kept, no longer fed). Until `r` positive elements have arrived the
//!   anchor can still fall; those elements are buffered and replayed into
//!   every sketch created below the previous anchor.
//!
//! [`AnchorPolicy::RunningMax`] uses rank one, i.e. the running maximum.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, SubmodularFn};

use super::grid::{BucketGrid, GridParams, Placement};
use super::summary::RobustSummary;

/// Streaming structure built for one estimate of the optimum.
pub trait Sketch<F: SubmodularFn> {
    /// Offers one element; returns whether it was stored.
    fn offer(&mut self, eval: &Evaluator<F>, e: ElementId, costs: &[f64]) -> Result<bool>;

    fn summary(&self) -> RobustSummary;

    fn stored(&self) -> usize;
}

/// Builds sketches for a given estimate.
pub trait SketchFactory<F: SubmodularFn> {
    type Output: Sketch<F>;

    fn build(&self, eval: &Evaluator<F>, tau_star: f64) -> Result<Self::Output>;

    /// Smallest density the sketch for `tau_star` ever accepts.
    fn min_threshold(&self, tau_star: f64) -> f64;

    /// Number of largest singletons of which at least one survives any
    /// admissible removal.
    fn removal_rank(&self) -> usize;
}

impl<F: SubmodularFn> Sketch<F> for BucketGrid<F::State> {
    fn offer(&mut self, eval: &Evaluator<F>, e: ElementId, costs: &[f64]) -> Result<bool> {
        Ok(matches!(
            BucketGrid::offer(self, eval, e, costs)?,
            Placement::Placed { .. }
        ))
    }

    fn summary(&self) -> RobustSummary {
        BucketGrid::summary(self)
    }

    fn stored(&self) -> usize {
        self.element_count()
    }
}

/// Factory for the partition/bucket grids.
#[derive(Clone, Debug)]
pub struct GridFactory {
    template: GridParams,
}

impl GridFactory {
    /// `template` fixes the rules, removal bound, knapsacks and budget; its
    /// estimate is replaced per sketch.
    pub fn new(template: GridParams) -> Self {
        Self { template }
    }

    pub fn template(&self) -> &GridParams {
        &self.template
    }
}

impl<F: SubmodularFn> SketchFactory<F> for GridFactory {
    type Output = BucketGrid<F::State>;

    fn build(&self, eval: &Evaluator<F>, tau_star: f64) -> Result<Self::Output> {
        Ok(BucketGrid::new(self.template.with_tau_star(tau_star)?, eval))
    }

    fn min_threshold(&self, tau_star: f64) -> f64 {
        self.template
            .with_tau_star(tau_star)
            .map(|p| p.min_threshold())
            .unwrap_or(f64::INFINITY)
    }

    fn removal_rank(&self) -> usize {
        // Costs are at least one, so a cost budget `M` removes at most `⌊M⌋`
        // elements.
        self.template.removals.floor() as usize + 1
    }
}

/// How the lower end of the ladder is anchored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnchorPolicy {
    /// Anchor on the `(m+1)`-th largest singleton gain.
    #[default]
    RemovalAware,
    /// Anchor on the running maximum singleton gain.
    RunningMax,
}

/// Sketches for all live estimates.
pub struct GuessLadder<F: SubmodularFn, K: SketchFactory<F>> {
    factory: K,
    epsilon: f64,
    rank: usize,
    sketches: BTreeMap<i64, K::Output>,
    frozen: BTreeMap<i64, K::Output>,
    /// Largest positive singleton gains, descending, at most `rank`.
    top: Vec<f64>,
    buffer: Vec<(ElementId, Vec<f64>, f64)>,
    v_max: f64,
    empty_value: Option<f64>,
    seen: usize,
}

impl<F: SubmodularFn, K: SketchFactory<F>> GuessLadder<F, K> {
    pub fn new(factory: K, epsilon: f64, policy: AnchorPolicy) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
        }
        let rank = match policy {
            AnchorPolicy::RemovalAware => factory.removal_rank().max(1),
            AnchorPolicy::RunningMax => 1,
        };
        Ok(Self {
            factory,
            epsilon,
            rank,
            sketches: BTreeMap::new(),
            frozen: BTreeMap::new(),
            top: Vec::new(),
            buffer: Vec::new(),
            v_max: 0.0,
            empty_value: None,
            seen: 0,
        })
    }

    pub fn factory(&self) -> &K {
        &self.factory
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn estimate(&self, j: i64) -> f64 {
        (1.0 + self.epsilon).powi(j as i32)
    }

    /// Current lower anchor (zero before any positive element).
    pub fn anchor(&self) -> f64 {
        self.top.last().copied().unwrap_or(0.0)
    }

    pub fn max_singleton(&self) -> f64 {
        self.v_max
    }

    /// Number of elements offered so far.
    pub fn seen(&self) -> usize {
        self.seen
    }

    /// Live sketches with their estimates, ascending.
    pub fn sketches(&self) -> impl Iterator<Item = (f64, &K::Output)> {
        self.sketches.iter().map(|(&j, s)| (self.estimate(j), s))
    }

    /// Frozen sketches with their estimates, ascending.
    pub fn frozen(&self) -> impl Iterator<Item = (f64, &K::Output)> {
        self.frozen.iter().map(|(&j, s)| (self.estimate(j), s))
    }

    /// Summaries of all sketches, frozen and live, by ascending estimate.
    pub fn summaries(&self) -> Vec<RobustSummary> {
        self.frozen
            .values()
            .chain(self.sketches.values())
            .map(|s| s.summary())
            .collect()
    }

    /// Summaries of the live sketches only.
    pub fn live_summaries(&self) -> Vec<RobustSummary> {
        self.sketches.values().map(|s| s.summary()).collect()
    }

    /// Elements stored across all sketches, counted with multiplicity.
    pub fn stored(&self) -> usize {
        self.frozen
            .values()
            .chain(self.sketches.values())
            .map(|s| s.stored())
            .sum()
    }

    fn live_range(&self) -> Option<(i64, i64)> {
        let lo = self.anchor();
        if lo <= 0.0 {
            return None;
        }
        let base = (1.0 + self.epsilon).ln();
        let floor = lo / (1.0 + self.epsilon);
        let mut first = (floor.ln() / base).floor() as i64 - 1;
        while self.estimate(first) < floor {
            first += 1;
        }
        while self.estimate(first - 1) >= floor {
            first -= 1;
        }
        let mut last = first - 1;
        while self.factory.min_threshold(self.estimate(last + 1)) <= self.v_max {
            last += 1;
        }
        Some((first, last))
    }

    /// Offers one stream element to every live sketch.
    pub fn offer(&mut self, eval: &Evaluator<F>, e: ElementId, costs: &[f64]) -> Result<()> {
        self.seen += 1;
        let empty_value = *self.empty_value.get_or_insert_with(|| eval.empty_value());
        let gain = (eval.value_with(&eval.empty_state(), e) - empty_value).max(0.0);
        if gain <= 0.0 {
            // Zero singleton gain means zero gain everywhere.
            return Ok(());
        }
        self.v_max = self.v_max.max(gain);
        let filling = self.top.len() < self.rank;
        let pos = self.top.partition_point(|&g| g >= gain);
        self.top.insert(pos, gain);
        self.top.truncate(self.rank);
        if filling {
            self.buffer.push((e, costs.to_vec(), gain));
        }

        let Some((first, last)) = self.live_range() else {
            return Ok(());
        };
        while let Some(entry) = self.sketches.first_entry() {
            if *entry.key() >= first {
                break;
            }
            let (j, sketch) = entry.remove_entry();
            self.frozen.insert(j, sketch);
        }
        let mut fresh = Vec::new();
        for j in first..=last {
            if !self.sketches.contains_key(&j) && !self.frozen.contains_key(&j) {
                let sketch = self.factory.build(eval, self.estimate(j))?;
                self.sketches.insert(j, sketch);
                fresh.push(j);
            }
        }
        for (&j, sketch) in self.sketches.iter_mut() {
            let threshold = self.factory.min_threshold((1.0 + self.epsilon).powi(j as i32));
            if filling && fresh.binary_search(&j).is_ok() {
                // A sketch born while the anchor can still fall may sit below
                // estimates that already saw the buffered elements.
                for (b, c, g) in &self.buffer {
                    if *g >= threshold {
                        sketch.offer(eval, *b, c)?;
                    }
                }
            } else if gain >= threshold {
                sketch.offer(eval, e, costs)?;
            }
        }
        if self.top.len() == self.rank && !self.buffer.is_empty() {
            self.buffer = Vec::new();
        }
        Ok(())
    }

    /// Runs a whole stream.
    pub fn run(
        &mut self,
        eval: &Evaluator<F>,
        stream: impl IntoIterator<Item = (ElementId, Vec<f64>)>,
    ) -> Result<()> {
        for (e, costs) in stream {
            self.offer(eval, e, &costs)?;
        }
        Ok(())
    }
}

/// Estimates `(1+ε)^j` covering `[lo, hi]`: from the largest power at most
/// `lo` to the smallest power at least `hi`.
pub fn guesses_covering(lo: f64, hi: f64, epsilon: f64) -> Vec<f64> {
    if !(lo > 0.0 && hi >= lo && epsilon > 0.0) {
        return Vec::new();
    }
    let base = 1.0 + epsilon;
    let at = |j: i64| base.powi(j as i32);
    let mut first = (lo.ln() / base.ln()).floor() as i64;
    while at(first) > lo {
        first -= 1;
    }
    while at(first + 1) <= lo {
        first += 1;
    }
    let mut last = first;
    while at(last) < hi {
        last += 1;
    }
    (first..=last).map(at).collect()
}
