use std::collections::{BTreeMap, BTreeSet};

use crate::objective::{ElementId, SubmodularFn};

/// Sparse user-indexed vector, sorted by user id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn new(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|&(u, _)| u);
        entries.dedup_by_key(|(u, _)| *u);
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn get(&self, user: u32) -> f64 {
        self.entries
            .binary_search_by_key(&user, |&(u, _)| u)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// Dot product, iterating the smaller support.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .map(|&(u, x)| x * large.get(u))
            .sum()
    }
}

/// Mean-centred rating vectors and genre labels for a movie catalogue.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RatingsModel {
    /// External movie ids, indexed by element id.
    pub movies: Vec<u64>,
    /// `v_{x,u} = r_{x,u} − r_avg` where user `u` rated `x`.
    pub vectors: Vec<SparseVector>,
    pub genres: Vec<BTreeSet<String>>,
    pub r_avg: f64,
    /// Movies (element ids) rated by each user.
    pub user_ratings: BTreeMap<u32, Vec<ElementId>>,
}

impl RatingsModel {
    pub fn len(&self) -> usize {
        self.movies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movies.is_empty()
    }

    /// Restriction to the listed movies (renumbered in the given order).
    pub fn restrict(&self, movies: &[ElementId]) -> RatingsModel {
        let mut index = BTreeMap::new();
        for (new, &old) in movies.iter().enumerate() {
            index.insert(old, new as ElementId);
        }
        let user_ratings = self
            .user_ratings
            .iter()
            .filter_map(|(&u, rated)| {
                let kept: Vec<ElementId> = rated.iter().filter_map(|m| index.get(m).copied()).collect();
                (!kept.is_empty()).then_some((u, kept))
            })
            .collect();
        RatingsModel {
            movies: movies.iter().map(|&m| self.movies[m as usize]).collect(),
            vectors: movies.iter().map(|&m| self.vectors[m as usize].clone()).collect(),
            genres: movies.iter().map(|&m| self.genres[m as usize].clone()).collect(),
            r_avg: self.r_avg,
            user_ratings,
        }
    }
}

/// `f_X(Z) = Σ_{x ∈ X} max(0, max_{z ∈ Z} ⟨v_z, v_x⟩)`, with the inner max
/// over an empty `Z` taken as zero.
#[derive(Clone, Debug)]
pub struct MovieCoverage {
    targets: Vec<ElementId>,
    /// `similarity[z * |X| + k] = ⟨v_z, v_{X_k}⟩`.
    similarity: Vec<f64>,
    n: usize,
}

impl MovieCoverage {
    pub fn new(model: &RatingsModel, targets: Vec<ElementId>) -> Self {
        let n = model.len();
        let width = targets.len();
        let mut similarity = vec![0.0; n * width];
        for z in 0..n {
            for (k, &x) in targets.iter().enumerate() {
                similarity[z * width + k] = model.vectors[z].dot(&model.vectors[x as usize]);
            }
        }
        Self {
            targets,
            similarity,
            n,
        }
    }

    pub fn targets(&self) -> &[ElementId] {
        &self.targets
    }

    fn row(&self, z: ElementId) -> &[f64] {
        let width = self.targets.len();
        &self.similarity[z as usize * width..(z as usize + 1) * width]
    }
}

#[derive(Clone, Debug)]
pub struct CoverageBest {
    best: Vec<f64>,
    value: f64,
}

impl SubmodularFn for MovieCoverage {
    type State = CoverageBest;

    fn ground_size(&self) -> usize {
        self.n
    }

    fn empty_state(&self) -> CoverageBest {
        CoverageBest {
            best: vec![0.0; self.targets.len()],
            value: 0.0,
        }
    }

    fn state_value(&self, state: &CoverageBest) -> f64 {
        state.value
    }

    fn value_with(&self, state: &CoverageBest, e: ElementId) -> f64 {
        let extra: f64 = self
            .row(e)
            .iter()
            .zip(&state.best)
            .map(|(&s, &b)| (s - b).max(0.0))
            .sum();
        state.value + extra
    }

    fn insert(&self, state: &mut CoverageBest, e: ElementId) {
        let width = self.targets.len();
        let row = &self.similarity[e as usize * width..(e as usize + 1) * width];
        for (b, &s) in state.best.iter_mut().zip(row) {
            if s > *b {
                state.value += s - *b;
                *b = s;
            }
        }
    }
}

/// Direct evaluation of the clamped movie coverage objective.
pub fn movie_coverage_value(model: &RatingsModel, targets: &[ElementId], set: &[ElementId]) -> f64 {
    targets
        .iter()
        .map(|&x| {
            set.iter()
                .map(|&z| model.vectors[z as usize].dot(&model.vectors[x as usize]))
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Good and bad genre sets describing one knapsack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenreCostSpec {
    pub good: BTreeSet<String>,
    pub bad: BTreeSet<String>,
    /// Upper bound on the number of genres describing the good/bad sets.
    pub t: u32,
}

impl GenreCostSpec {
    pub fn new(good: &[&str], bad: &[&str], t: u32) -> Self {
        Self {
            good: good.iter().map(|s| s.to_string()).collect(),
            bad: bad.iter().map(|s| s.to_string()).collect(),
            t,
        }
    }

    /// Comedy/Horror good, Adventure/Action bad.
    pub fn first_knapsack() -> Self {
        Self::new(&["Comedy", "Horror"], &["Adventure", "Action"], 2)
    }

    /// Drama/Romance good, Sci-Fi/Fantasy bad.
    pub fn second_knapsack() -> Self {
        Self::new(&["Drama", "Romance"], &["Sci-Fi", "Fantasy"], 2)
    }
}

/// `c(x) = 1 + 0.5 · (bad(x) − good(x) + t)`.
pub fn genre_cost(genres: &BTreeSet<String>, spec: &GenreCostSpec) -> f64 {
    let good = genres.iter().filter(|g| spec.good.contains(*g)).count() as f64;
    let bad = genres.iter().filter(|g| spec.bad.contains(*g)).count() as f64;
    1.0 + 0.5 * (bad - good + spec.t as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genres(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn model(vectors: Vec<Vec<(u32, f64)>>) -> RatingsModel {
        let n = vectors.len();
        RatingsModel {
            movies: (0..n as u64).collect(),
            vectors: vectors.into_iter().map(SparseVector::new).collect(),
            genres: vec![BTreeSet::new(); n],
            r_avg: 0.0,
            user_ratings: BTreeMap::new(),
        }
    }

    #[test]
    fn genre_cost_examples() {
        let spec = GenreCostSpec::first_knapsack();
        assert_eq!(genre_cost(&genres(&["Comedy"]), &spec), 1.5);
        assert_eq!(genre_cost(&genres(&["Action", "Adventure"]), &spec), 3.0);
        assert_eq!(genre_cost(&genres(&["Comedy", "Horror"]), &spec), 1.0);
    }

    #[test]
    fn coverage_examples() {
        // x = 0 with v = (1, 0); z = 1 with v = (0.5, 0.5); z' = 2 with v = (-1, 0).
        let m = model(vec![
            vec![(0, 1.0)],
            vec![(0, 0.5), (1, 0.5)],
            vec![(0, -1.0)],
        ]);
        assert_eq!(movie_coverage_value(&m, &[0], &[]), 0.0);
        assert_eq!(movie_coverage_value(&m, &[0], &[1]), 0.5);
        assert_eq!(movie_coverage_value(&m, &[0], &[2]), 0.0);

        let f = MovieCoverage::new(&m, vec![0]);
        assert_eq!(f.state_value(&f.build_state(&[1])), 0.5);
        assert_eq!(f.state_value(&f.build_state(&[2])), 0.0);
        assert_eq!(f.state_value(&f.build_state(&[2, 1, 0])), 1.0);
    }

    #[test]
    fn sparse_dot() {
        let a = SparseVector::new(vec![(3, 2.0), (1, 1.0)]);
        let b = SparseVector::new(vec![(1, 4.0), (2, 5.0), (3, -1.0)]);
        assert_eq!(a.dot(&b), 2.0);
        assert_eq!(b.dot(&a), 2.0);
        assert_eq!(a.get(2), 0.0);
    }
}
