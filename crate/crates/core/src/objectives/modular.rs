use fixedbitset::FixedBitSet;

use crate::objective::{ElementId, SubmodularFn};

/// `f(S) = Σ_{e ∈ S} w_e` with nonnegative weights.
#[derive(Clone, Debug)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Self {
        assert!(weights.iter().all(|&w| w >= 0.0), "weights must be nonnegative");
        Self { weights }
    }
}

#[derive(Clone, Debug)]
pub struct ModularState {
    members: FixedBitSet,
    value: f64,
}

impl SubmodularFn for Modular {
    type State = ModularState;

    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn empty_state(&self) -> ModularState {
        ModularState {
            members: FixedBitSet::with_capacity(self.weights.len()),
            value: 0.0,
        }
    }

    fn state_value(&self, state: &ModularState) -> f64 {
        state.value
    }

    fn value_with(&self, state: &ModularState, e: ElementId) -> f64 {
        if state.members.contains(e as usize) {
            state.value
        } else {
            state.value + self.weights[e as usize]
        }
    }

    fn insert(&self, state: &mut ModularState, e: ElementId) {
        if !state.members.put(e as usize) {
            state.value += self.weights[e as usize];
        }
    }
}
