use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::objective::{ElementId, SubmodularFn};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Edges are symmetrized, self-loops
    /// dropped and duplicates collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) out of range");
            if u == v {
                continue;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Self { adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| (u as u32) < v)
                .map(move |v| (u as u32, v))
        })
    }

    /// Subgraph induced by `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[u32]) -> Self {
        let mut index = vec![u32::MAX; self.vertex_count()];
        for (new, &old) in vertices.iter().enumerate() {
            index[old as usize] = new as u32;
        }
        let edges = vertices.iter().flat_map(|&old| {
            let index = &index;
            self.neighbors(old)
                .iter()
                .filter(move |&&v| index[v as usize] != u32::MAX)
                .map(move |&v| (index[old as usize], index[v as usize]))
        });
        Self::from_edges(vertices.len(), edges.collect::<Vec<_>>())
    }
}

/// `f(Z) = |Z ∪ N(Z)| / |V|`.
#[derive(Clone, Debug)]
pub struct DominatingSet {
    graph: Arc<Graph>,
}

impl DominatingSet {
    pub fn new(graph: Arc<Graph>) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    fn scale(&self) -> f64 {
        match self.graph.vertex_count() {
            0 => 0.0,
            n => 1.0 / n as f64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DominatedState {
    dominated: FixedBitSet,
    count: usize,
}

impl SubmodularFn for DominatingSet {
    type State = DominatedState;

    fn ground_size(&self) -> usize {
        self.graph.vertex_count()
    }

    fn empty_state(&self) -> DominatedState {
        DominatedState {
            dominated: FixedBitSet::with_capacity(self.graph.vertex_count()),
            count: 0,
        }
    }

    fn state_value(&self, state: &DominatedState) -> f64 {
        state.count as f64 * self.scale()
    }

    fn value_with(&self, state: &DominatedState, e: ElementId) -> f64 {
        let mut count = state.count;
        if !state.dominated.contains(e as usize) {
            count += 1;
        }
        count += self
            .graph
            .neighbors(e)
            .iter()
            .filter(|&&v| !state.dominated.contains(v as usize))
            .count();
        count as f64 * self.scale()
    }

    fn insert(&self, state: &mut DominatedState, e: ElementId) {
        if !state.dominated.put(e as usize) {
            state.count += 1;
        }
        for &v in self.graph.neighbors(e) {
            if !state.dominated.put(v as usize) {
                state.count += 1;
            }
        }
    }
}

/// `|Z ∪ N(Z)| / n` computed directly.
pub fn dominating_set_value(graph: &Graph, set: &[u32]) -> Result<f64> {
    let n = graph.vertex_count();
    if let Some(v) = set.iter().find(|&&v| v as usize >= n) {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} out of range for a graph with {n} vertices"
        )));
    }
    let objective = DominatingSet::new(Arc::new(graph.clone()));
    Ok(objective.state_value(&objective.build_state(set)))
}
