use fixedbitset::FixedBitSet;

use crate::objective::{ElementId, SubmodularFn};

/// Weighted set coverage: element `e` covers a subset of a weighted universe
/// and `f(S)` is the total weight covered by `S`.
#[derive(Clone, Debug)]
pub struct WeightedCoverage {
    weights: Vec<f64>,
    sets: Vec<Vec<u32>>,
}

impl WeightedCoverage {
    pub fn new(weights: Vec<f64>, sets: Vec<Vec<u32>>) -> Self {
        assert!(weights.iter().all(|&w| w >= 0.0), "weights must be nonnegative");
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                assert!(s.iter().all(|&u| (u as usize) < weights.len()), "item out of range");
                s
            })
            .collect();
        Self { weights, sets }
    }

    /// Unit-weight coverage over a universe of `universe` items.
    pub fn unit(universe: usize, sets: Vec<Vec<u32>>) -> Self {
        Self::new(vec![1.0; universe], sets)
    }

    pub fn universe(&self) -> usize {
        self.weights.len()
    }

    pub fn set(&self, e: ElementId) -> &[u32] {
        &self.sets[e as usize]
    }
}

#[derive(Clone, Debug)]
pub struct CoverageState {
    covered: FixedBitSet,
    value: f64,
}

impl SubmodularFn for WeightedCoverage {
    type State = CoverageState;

    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn empty_state(&self) -> CoverageState {
        CoverageState {
            covered: FixedBitSet::with_capacity(self.weights.len()),
            value: 0.0,
        }
    }

    fn state_value(&self, state: &CoverageState) -> f64 {
        state.value
    }

    fn value_with(&self, state: &CoverageState, e: ElementId) -> f64 {
        let extra: f64 = self.sets[e as usize]
            .iter()
            .filter(|&&u| !state.covered.contains(u as usize))
            .map(|&u| self.weights[u as usize])
            .sum();
        state.value + extra
    }

    fn insert(&self, state: &mut CoverageState, e: ElementId) {
        for &u in &self.sets[e as usize] {
            if !state.covered.put(u as usize) {
                state.value += self.weights[u as usize];
            }
        }
    }
}
