//! Non-robust streaming and offline algorithms made robust by inflating
//! their capacity by a factor `γ ≥ 1`.

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, Solution, SubmodularFn};
use crate::streaming::{RobustSummary, Sketch, SketchFactory, SummaryEntry};

use super::solvers::offline_greedy;

/// Acceptance rule of a single-set threshold baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineKind {
    /// `gain / c_a(e) ≥ θ` in every knapsack, default `θ = τ*/(2γK)`.
    MarginalRatio,
    /// `gain / max_a c_a(e) ≥ τ*/((1+2d)K)`.
    Multidimensional,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::MarginalRatio => "marginal-ratio",
            BaselineKind::Multidimensional => "multidimensional",
        }
    }
}

/// One growing set with capacity `γK` per knapsack.
#[derive(Clone, Debug)]
pub struct ThresholdSet<S> {
    kind: BaselineKind,
    tau_star: f64,
    threshold: f64,
    capacity: f64,
    entries: Vec<SummaryEntry>,
    totals: Vec<f64>,
    state: S,
    value: f64,
}

impl<S> ThresholdSet<S> {
    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn elements(&self) -> Vec<ElementId> {
        self.entries.iter().map(|e| e.element).collect()
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl<F: SubmodularFn> Sketch<F> for ThresholdSet<F::State> {
    fn offer(&mut self, eval: &Evaluator<F>, e: ElementId, costs: &[f64]) -> Result<bool> {
        if costs.len() != self.totals.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} cost entries, got {}",
                self.totals.len(),
                costs.len()
            )));
        }
        if !self
            .totals
            .iter()
            .zip(costs)
            .all(|(t, c)| t + c <= self.capacity)
        {
            return Ok(false);
        }
        let v = eval.value_with(&self.state, e);
        let gain = (v - self.value).max(0.0);
        let accept = match self.kind {
            BaselineKind::MarginalRatio => costs.iter().all(|c| gain / c >= self.threshold),
            BaselineKind::Multidimensional => {
                let c = costs.iter().copied().fold(f64::MIN, f64::max);
                gain / c >= self.threshold
            }
        };
        if !accept {
            return Ok(false);
        }
        eval.insert(&mut self.state, e);
        self.value = v;
        for (t, c) in self.totals.iter_mut().zip(costs) {
            *t += c;
        }
        self.entries.push(SummaryEntry {
            element: e,
            partition: 0,
            bucket: 0,
            costs: costs.to_vec(),
        });
        Ok(true)
    }

    fn summary(&self) -> RobustSummary {
        RobustSummary {
            tau_star: self.tau_star,
            partition_count: 1,
            entries: self.entries.clone(),
        }
    }

    fn stored(&self) -> usize {
        self.entries.len()
    }
}

/// Builds [`ThresholdSet`]s for the guess ladder.
#[derive(Clone, Debug)]
pub struct BaselineFactory {
    pub kind: BaselineKind,
    pub gamma: f64,
    pub budget: f64,
    pub dims: usize,
    /// Removal count used to anchor the ladder.
    pub removals: usize,
    /// Fixed θ for [`BaselineKind::MarginalRatio`] instead of `τ*/(2γK)`.
    pub theta: Option<f64>,
}

impl BaselineFactory {
    pub fn new(kind: BaselineKind, gamma: f64, budget: f64, dims: usize, removals: usize) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("inflation must be ≥ 1, got {gamma}")));
        }
        Ok(Self {
            kind,
            gamma,
            budget,
            dims,
            removals,
            theta: None,
        })
    }

    pub fn threshold(&self, tau_star: f64) -> f64 {
        match self.kind {
            BaselineKind::MarginalRatio => self
                .theta
                .unwrap_or(tau_star / (2.0 * self.gamma * self.budget)),
            BaselineKind::Multidimensional => {
                tau_star / ((1.0 + 2.0 * self.dims as f64) * self.budget)
            }
        }
    }
}

impl<F: SubmodularFn> SketchFactory<F> for BaselineFactory {
    type Output = ThresholdSet<F::State>;

    fn build(&self, eval: &Evaluator<F>, tau_star: f64) -> Result<Self::Output> {
        let state = eval.empty_state();
        let value = eval.inner().state_value(&state);
        Ok(ThresholdSet {
            kind: self.kind,
            tau_star,
            threshold: self.threshold(tau_star),
            capacity: self.gamma * self.budget,
            entries: Vec::new(),
            totals: vec![0.0; self.dims],
            state,
            value,
        })
    }

    fn min_threshold(&self, tau_star: f64) -> f64 {
        self.threshold(tau_star)
    }

    fn removal_rank(&self) -> usize {
        self.removals + 1
    }
}

/// Density greedy with every budget inflated to `γK`; single knapsack only.
pub fn robustified_greedy<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    stream: &[ElementId],
    gamma: f64,
) -> Result<Solution> {
    if instance.dims() != 1 {
        return Err(Error::InvalidArgument(
            "the robustified greedy baseline handles one knapsack".into(),
        ));
    }
    if !(gamma >= 1.0) {
        return Err(Error::InvalidArgument(format!("inflation must be ≥ 1, got {gamma}")));
    }
    Ok(offline_greedy(eval, instance, stream, Some(gamma * instance.budget())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Modular;

    fn run(factory: &BaselineFactory, tau_star: f64, costs: &[f64], weights: &[f64]) -> Vec<ElementId> {
        let eval = Evaluator::new(Modular::new(weights.to_vec()));
        let mut set = factory.build(&eval, tau_star).unwrap();
        for (e, &c) in costs.iter().enumerate() {
            set.offer(&eval, e as ElementId, &[c]).unwrap();
        }
        set.elements()
    }

    #[test]
    fn marginal_ratio_examples() {
        let mut f = BaselineFactory::new(BaselineKind::MarginalRatio, 2.0, 2.0, 1, 0).unwrap();
        f.theta = Some(1.5);
        assert_eq!(run(&f, 1.0, &[2.0, 1.0, 1.0], &[3.0, 2.0, 2.0]), vec![0, 1, 2]);
        f.theta = Some(f64::INFINITY);
        assert!(run(&f, 1.0, &[2.0, 1.0, 1.0], &[3.0, 2.0, 2.0]).is_empty());
        f.theta = Some(f64::MIN_POSITIVE);
        f.gamma = 100.0;
        assert_eq!(run(&f, 1.0, &[1.0, 1.0, 1.0], &[1.0, 0.0, 2.0]), vec![0, 2]);
    }

    #[test]
    fn multidimensional_boundary_is_inclusive() {
        // d = 1, K = 2: threshold τ*/(3K); τ* = 6·density 1 gives threshold 1.
        let f = BaselineFactory::new(BaselineKind::Multidimensional, 1.0, 2.0, 1, 0).unwrap();
        assert_eq!(f.threshold(6.0), 1.0);
        assert_eq!(run(&f, 6.0, &[1.0, 1.0], &[1.0, 0.5]), vec![0]);
        assert!(run(&f, 6.0, &[], &[]).is_empty());
    }

    #[test]
    fn greedy_baseline_uses_inflated_budget() {
        let eval = Evaluator::new(Modular::new(vec![3.0, 2.0, 2.0]));
        let inst = KnapsackInstance::normalized_from_rows(vec![vec![2.0, 1.0, 1.0]], 2.0).unwrap();
        let s = robustified_greedy(&eval, &inst, &[0, 1, 2], 2.0).unwrap();
        assert_eq!(s.elements, vec![0, 1, 2]);
    }
}
