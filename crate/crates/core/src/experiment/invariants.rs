//! Randomized invariant suite shared by `selfcheck` and the acceptance tests.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{synthetic_ratings, synthetic_social_graph};
use crate::objective::{is_feasible, normalize, ElementId, Evaluator, KnapsackInstance, SubmodularFn};
use crate::objectives::{DominatingSet, MovieCoverage, WeightedCoverage};
use crate::streaming::{BucketGrid, GridParams};

/// Outcome of [`invariant_suite`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub streams: usize,
    /// Individual checks performed.
    pub checks: usize,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.violations.len() < 100 {
            self.violations.push(what());
        }
    }
}

const TOLERANCE: f64 = 1e-9;

/// Feasibility before and after normalization agree for random subsets,
/// up to rounding at the exact budget boundary.
fn check_normalization(report: &mut InvariantReport, rng: &mut ChaCha8Rng, raw: &KnapsackInstance, norm: &KnapsackInstance, stream: usize) {
    let n = raw.len() as ElementId;
    for _ in 0..4 {
        let set: Vec<ElementId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        let near_boundary = |inst: &KnapsackInstance| {
            inst.cost_totals(&set)
                .iter()
                .zip(inst.budgets())
                .any(|(t, b)| (t - b).abs() <= TOLERANCE * b.max(1.0))
        };
        if near_boundary(raw) || near_boundary(norm) {
            continue;
        }
        let before = is_feasible(raw, &set).unwrap_or(false);
        let after = is_feasible(norm, &set).unwrap_or(!before);
        report.record(before == after, || {
            format!("stream {stream}: normalization changed feasibility of {set:?}")
        });
    }
}

/// Monotonicity and submodularity on random nested pairs `A ⊆ B`.
fn check_objective<F: SubmodularFn>(report: &mut InvariantReport, rng: &mut ChaCha8Rng, eval: &Evaluator<F>, name: &str, triples: usize) {
    let n = eval.ground_size() as ElementId;
    if n == 0 {
        return;
    }
    for _ in 0..triples {
        let b: Vec<ElementId> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        let a: Vec<ElementId> = b.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let e = rng.gen_range(0..n);
        let (fa, fb) = (eval.evaluate(&a), eval.evaluate(&b));
        let with = |s: &[ElementId]| {
            let mut s = s.to_vec();
            s.push(e);
            eval.evaluate(&s)
        };
        let scale = fb.abs().max(1.0);
        report.record(fa <= fb + TOLERANCE * scale, || format!("{name}: f(A) > f(B) for A ⊆ B"));
        report.record(with(&a) - fa + TOLERANCE * scale >= with(&b) - fb, || {
            format!("{name}: marginal gain of {e} grows from A to B ⊇ A")
        });
        report.record(fa >= -TOLERANCE, || format!("{name}: negative value"));
    }
}

/// Runs `streams` randomized grid streams. Each draws a rule, a raw
/// instance that is then normalized, a coverage objective with small
/// integer weights and a random arrival order, and checks every grid
/// invariant mid-stream and at the end. Every 50th stream also checks
/// monotonicity and submodularity of the three experiment objectives.
pub fn invariant_suite(streams: usize, seed: u64) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InvariantReport {
        streams,
        ..Default::default()
    };
    for s in 0..streams {
        let n = rng.gen_range(1..=60usize);
        let rule = rng.gen_range(0..3);
        let d = if rule == 2 { rng.gen_range(1..=3) } else { 1 };
        let budgets: Vec<f64> = (0..d).map(|_| rng.gen_range(2.0..40.0)).collect();
        let rows: Vec<Vec<f64>> = budgets
            .iter()
            .map(|b| (0..n).map(|_| rng.gen_range(0.05..1.0) * b).collect())
            .collect();
        let raw = KnapsackInstance::new(rows, budgets).expect("positive costs");
        let instance = normalize(&raw).expect("valid instance");
        check_normalization(&mut report, &mut rng, &raw, &instance, s);
        let k = instance.budget();

        let universe = 2 * n + 3;
        let weights = (0..universe).map(|_| rng.gen_range(1..=5) as f64).collect();
        let sets = (0..n)
            .map(|_| (0..rng.gen_range(0..=5)).map(|_| rng.gen_range(0..universe as u32)).collect())
            .collect();
        let eval = Evaluator::new(WeightedCoverage::new(weights, sets));

        let m = rng.gen_range(0..=4usize);
        let tau_star = rng.gen_range(0.5..60.0);
        let params = match rule {
            0 => GridParams::num(m, k, tau_star),
            1 => GridParams::size_from_estimate(rng.gen_range(0.0..8.0), k, tau_star),
            _ => GridParams::mult(d, m, k, tau_star),
        }
        .expect("valid parameters");

        let mut stream = instance.stream();
        stream.shuffle(&mut rng);
        let checkpoint = rng.gen_range(0..=stream.len());
        let mut grid = BucketGrid::new(params, &eval);
        for (i, &e) in stream.iter().enumerate() {
            if i == checkpoint {
                let result = grid.check_invariants();
                report.record(result.is_ok(), || format!("stream {s} (mid): {}", result.unwrap_err()));
            }
            if let Err(err) = grid.offer(&eval, e, instance.costs(e)) {
                report.record(false, || format!("stream {s}: offer failed: {err}"));
            }
        }
        let result = grid.check_invariants();
        report.record(result.is_ok(), || format!("stream {s}: {}", result.unwrap_err()));

        if s % 50 == 0 {
            check_objective(&mut report, &mut rng, &eval, "coverage", 20);
            let graph = synthetic_social_graph(rng.gen_range(2..=50), 3, 0.5, rng.gen());
            check_objective(&mut report, &mut rng, &Evaluator::new(DominatingSet::new(Arc::new(graph))), "dominating set", 20);
            let model = synthetic_ratings(40, 30, 12, rng.gen());
            let targets: Vec<ElementId> = (0..40).filter(|_| rng.gen_bool(0.3)).collect();
            check_objective(&mut report, &mut rng, &Evaluator::new(MovieCoverage::new(&model, targets)), "movie coverage", 20);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let report = invariant_suite(200, 5);
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.checks > 400);
        assert_eq!(invariant_suite(200, 5), report);
    }
}
