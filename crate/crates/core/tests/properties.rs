use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_knapsack::objectives::{DominatingSet, Graph, Modular, WeightedCoverage};
use robust_knapsack::offline::{brute_force_opt, offline_greedy, OfflineSolver};
use robust_knapsack::streaming::{
    parse_summaries, prune, robust_query, run_grid, write_summaries, GridParams,
};
use robust_knapsack::{is_feasible, normalize, ElementId, Evaluator, KnapsackInstance, SubmodularFn};

fn coverage() -> impl Strategy<Value = WeightedCoverage> {
    (1usize..12, 1usize..16).prop_flat_map(|(n, universe)| {
        (
            prop::collection::vec(1u32..6, universe),
            prop::collection::vec(prop::collection::vec(0..universe as u32, 0..5), n),
        )
            .prop_map(|(w, sets)| WeightedCoverage::new(w.into_iter().map(f64::from).collect(), sets))
    })
}

fn graph() -> impl Strategy<Value = Graph> {
    (2usize..14).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32), 0..30)
            .prop_map(move |edges| Graph::from_edges(n, edges))
    })
}

/// Seeded costs on the quarter grid of `[1, k]`.
fn costs(n: usize, d: usize, k: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (4.0 * (k - 1.0)) as u32;
    (0..d)
        .map(|_| (0..n).map(|_| 1.0 + 0.25 * f64::from(rng.gen_range(0..=steps))).collect())
        .collect()
}

fn subset(n: usize) -> impl Strategy<Value = Vec<ElementId>> {
    prop::collection::vec(any::<bool>(), n)
        .prop_map(|mask| mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as ElementId).collect())
}

fn check_monotone_submodular<F: SubmodularFn>(eval: &Evaluator<F>, b: &[ElementId], keep: &[bool], e: ElementId) {
    let a: Vec<ElementId> = b.iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
    let (fa, fb) = (eval.evaluate(&a), eval.evaluate(b));
    assert!(fa <= fb + 1e-9);
    assert!(eval.marginal_gain(&a, e) + 1e-9 >= eval.marginal_gain(b, e));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn coverage_is_monotone_submodular(f in coverage(), seed in any::<u64>(), keep in prop::collection::vec(any::<bool>(), 1..8)) {
        let n = f.ground_size();
        let eval = Evaluator::new(f);
        let b: Vec<ElementId> = (0..n as ElementId).filter(|i| (seed >> (i % 64)) & 1 == 1).collect();
        check_monotone_submodular(&eval, &b, &keep, (seed % n as u64) as ElementId);
    }

    #[test]
    fn dominating_set_is_monotone_submodular(g in graph(), seed in any::<u64>(), keep in prop::collection::vec(any::<bool>(), 1..8)) {
        let n = g.vertex_count();
        let eval = Evaluator::new(DominatingSet::new(Arc::new(g)));
        let b: Vec<ElementId> = (0..n as ElementId).filter(|i| (seed >> (i % 64)) & 1 == 1).collect();
        check_monotone_submodular(&eval, &b, &keep, (seed % n as u64) as ElementId);
        prop_assert!(eval.evaluate(&b) <= 1.0 + 1e-12);
    }

    #[test]
    fn normalization_preserves_feasibility(
        (rows, budgets, set) in (1usize..8, 1usize..4).prop_flat_map(|(n, d)| (
            prop::collection::vec(prop::collection::vec(1u32..40, n), d),
            prop::collection::vec(20u32..80, d),
            subset(n),
        ))
    ) {
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
        let raw = KnapsackInstance::new(rows, budgets.into_iter().map(f64::from).collect()).unwrap();
        let norm = normalize(&raw).unwrap();
        prop_assert!(norm.is_normalized());
        let totals = raw.cost_totals(&set);
        let on_edge = totals.iter().zip(raw.budgets()).any(|(t, b)| (t - b).abs() < 1e-9);
        if !on_edge {
            prop_assert_eq!(is_feasible(&raw, &set).unwrap(), is_feasible(&norm, &set).unwrap());
        }
    }

    #[test]
    fn grid_invariants_hold_and_prune_never_grows(
        f in coverage(),
        rule in 0usize..3,
        k in prop::sample::select(vec![2.0, 3.0, 4.0, 8.0, 10.0]),
        m in 0usize..4,
        tau_star in 0.5f64..40.0,
        seed in any::<u64>(),
    ) {
        let n = f.ground_size();
        let d = if rule == 2 { 1 + (seed % 2) as usize } else { 1 };
        let rows = costs(n, d, k, seed);
        let eval = Evaluator::new(f);
        let instance = KnapsackInstance::normalized_from_rows(rows, k).unwrap();
        let params = match rule {
            0 => GridParams::num(m, k, tau_star),
            1 => GridParams::size_from_estimate(m as f64 * 1.5, k, tau_star),
            _ => GridParams::mult(d, m, k, tau_star),
        }.unwrap();
        let grid = run_grid(&eval, &instance, &params, &instance.stream()).unwrap();
        prop_assert!(grid.check_invariants().is_ok(), "{:?}", grid.check_invariants());
        let summary = grid.summary();
        let pruned = prune(&eval, &params, &summary).unwrap();
        prop_assert!(pruned.check_invariants().is_ok());
        prop_assert!(pruned.element_count() <= summary.len());
        let again = prune(&eval, &params, &pruned.summary()).unwrap();
        prop_assert_eq!(again.element_count(), pruned.element_count());
        let text = write_summaries(std::slice::from_ref(&summary));
        prop_assert_eq!(parse_summaries(&text).unwrap(), vec![summary]);
    }

    #[test]
    fn greedy_is_feasible_and_dominated_by_brute_force(
        weights in prop::collection::vec(0u32..10, 1..10),
        k in 1u32..8,
        seed in any::<u64>(),
    ) {
        let n = weights.len();
        let costs: Vec<f64> = (0..n).map(|i| f64::from(1 + ((seed >> (3 * i)) & 3) as u32)).collect();
        let eval = Evaluator::new(Modular::new(weights.into_iter().map(f64::from).collect()));
        let instance = KnapsackInstance::single(costs, f64::from(k)).unwrap();
        let all: Vec<ElementId> = (0..n as ElementId).collect();
        let greedy = offline_greedy(&eval, &instance, &all, None);
        let best = brute_force_opt(&eval, &instance, &all, None).unwrap();
        prop_assert!(is_feasible(&instance, &greedy.elements).unwrap());
        prop_assert!(greedy.value <= best.value + 1e-9);
        prop_assert!(2.0 * greedy.value + 1e-9 >= best.value * (1.0 - (-1.0f64).exp()));
    }

    #[test]
    fn query_ignores_removed_elements(f in coverage(), m in 0usize..3, removed_mask in any::<u16>()) {
        let n = f.ground_size();
        let eval = Evaluator::new(f);
        let instance = KnapsackInstance::normalized_from_rows(vec![vec![1.0; n]], 4.0).unwrap();
        let params = GridParams::num(m, 4.0, 1.0).unwrap();
        let grid = run_grid(&eval, &instance, &params, &instance.stream()).unwrap();
        let removed: Vec<ElementId> = (0..n as ElementId).filter(|i| removed_mask >> i & 1 == 1).collect();
        let answer = robust_query(&eval, &instance, &[grid.summary()], &removed, OfflineSolver::Greedy).unwrap();
        prop_assert!(answer.elements.iter().all(|e| !removed.contains(e)));
        prop_assert!(is_feasible(&instance, &answer.elements).unwrap());
    }
}
