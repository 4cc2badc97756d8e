//! Flat `section.key = value` experiment configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::Sample;
use crate::offline::{BaselineKind, OfflineSolver};
use crate::streaming::{Algorithm, AnchorPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    /// Preferential-attachment graph with triad closure.
    SyntheticGraph,
    /// SNAP edge list at `dataset.path`.
    Snap,
    /// MovieLens `ratings.csv` / `movies.csv`.
    MovieLens,
    /// Low-rank synthetic ratings.
    SyntheticMovies,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::SyntheticGraph => "synthetic-graph",
            DatasetKind::Snap => "snap",
            DatasetKind::MovieLens => "movielens",
            DatasetKind::SyntheticMovies => "synthetic-movies",
        }
    }

    pub fn is_graph(self) -> bool {
        matches!(self, DatasetKind::SyntheticGraph | DatasetKind::Snap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostSource {
    /// Independent `U(1, 3)` entries.
    Uniform,
    /// Genre-based costs, one good/bad genre pair per knapsack.
    Genre,
}

/// One algorithm of the comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Grid(Algorithm),
    Baseline(BaselineKind),
    /// Offline density greedy with inflated capacity.
    RobustGreedy,
}

impl AlgorithmChoice {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmChoice::Grid(a) => a.name(),
            AlgorithmChoice::Baseline(b) => b.name(),
            AlgorithmChoice::RobustGreedy => "greedy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "marginal-ratio" => Some(AlgorithmChoice::Baseline(BaselineKind::MarginalRatio)),
            "multidimensional" => Some(AlgorithmChoice::Baseline(BaselineKind::Multidimensional)),
            "greedy" => Some(AlgorithmChoice::RobustGreedy),
            other => Algorithm::parse(other).map(AlgorithmChoice::Grid),
        }
    }
}

/// How the baselines' capacity inflation is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaPolicy {
    Fixed(f64),
    /// Bisection towards the multi-knapsack summary size.
    Match,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dataset: DatasetKind,
    pub path: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub movies: Option<PathBuf>,
    pub sample: Option<Sample>,
    /// Synthetic graph size, links per vertex and triad-closure probability.
    pub vertices: usize,
    pub links: usize,
    pub triad: f64,
    /// Synthetic catalogue size, users and ratings per user.
    pub catalogue: usize,
    pub users: usize,
    pub per_user: usize,
    /// Minimum ratings of the target user.
    pub min_ratings: usize,
    /// Genre-count parameter `t` of the genre costs.
    pub genre_t: u32,
    pub dims: usize,
    pub budget: f64,
    pub costs: CostSource,
    pub algorithms: Vec<AlgorithmChoice>,
    /// Number of removals `m`.
    pub removals: usize,
    /// Total removal cost `M`; `2m` when absent.
    pub removal_cost: Option<f64>,
    pub epsilon: f64,
    pub prune: bool,
    pub anchor: AnchorPolicy,
    pub gamma: GammaPolicy,
    pub theta: Option<f64>,
    pub max_rounds: usize,
    pub solver: OfflineSolver,
    pub recompute_bound: bool,
    pub machines: usize,
    pub size_bound: Option<usize>,
    pub probability: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            dataset: DatasetKind::SyntheticGraph,
            path: None,
            ratings: None,
            movies: None,
            sample: None,
            vertices: 1000,
            links: 10,
            triad: 0.6,
            catalogue: 600,
            users: 300,
            per_user: 40,
            min_ratings: 20,
            genre_t: 2,
            dims: 1,
            budget: 10.0,
            costs: CostSource::Uniform,
            algorithms: vec![
                AlgorithmChoice::Grid(Algorithm::Mult),
                AlgorithmChoice::Baseline(BaselineKind::MarginalRatio),
                AlgorithmChoice::Baseline(BaselineKind::Multidimensional),
                AlgorithmChoice::RobustGreedy,
            ],
            removals: 5,
            removal_cost: None,
            epsilon: 0.2,
            prune: true,
            anchor: AnchorPolicy::RemovalAware,
            gamma: GammaPolicy::Match,
            theta: None,
            max_rounds: crate::adversary::DEFAULT_MAX_ROUNDS,
            solver: OfflineSolver::Greedy,
            recompute_bound: false,
            machines: 4,
            size_bound: None,
            probability: None,
        }
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad value {raw:?} for {key}"),
    })
}

fn optional<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Option<T>> {
    if raw == "auto" || raw == "none" {
        Ok(None)
    } else {
        value(line, key, raw).map(Some)
    }
}

fn bad(line: usize, key: &str, raw: &str) -> Error {
    Error::Parse {
        line,
        message: format!("bad value {raw:?} for {key}"),
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut saw_costs = false;
        for (index, raw_line) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, raw) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, got {content:?}"),
            })?;
            let (key, raw) = (key.trim(), raw.trim());
            match key {
                "seed" => c.seed = value(line, key, raw)?,
                "dataset.kind" => {
                    c.dataset = match raw {
                        "synthetic-graph" => DatasetKind::SyntheticGraph,
                        "snap" => DatasetKind::Snap,
                        "movielens" => DatasetKind::MovieLens,
                        "synthetic-movies" => DatasetKind::SyntheticMovies,
                        _ => return Err(bad(line, key, raw)),
                    }
                }
                "dataset.path" => c.path = Some(PathBuf::from(raw)),
                "dataset.ratings" => c.ratings = Some(PathBuf::from(raw)),
                "dataset.movies" => c.movies = Some(PathBuf::from(raw)),
                "dataset.fraction" => c.sample = Some(Sample::Fraction(value(line, key, raw)?)),
                "dataset.cap" => c.sample = Some(Sample::Cap(value(line, key, raw)?)),
                "dataset.vertices" => c.vertices = value(line, key, raw)?,
                "dataset.links" => c.links = value(line, key, raw)?,
                "dataset.triad" => c.triad = value(line, key, raw)?,
                "dataset.catalogue" => c.catalogue = value(line, key, raw)?,
                "dataset.users" => c.users = value(line, key, raw)?,
                "dataset.per_user" => c.per_user = value(line, key, raw)?,
                "objective.min_ratings" => c.min_ratings = value(line, key, raw)?,
                "objective.genre_t" => c.genre_t = value(line, key, raw)?,
                "constraint.d" => c.dims = value(line, key, raw)?,
                "constraint.k" => c.budget = value(line, key, raw)?,
                "constraint.costs" => {
                    saw_costs = true;
                    c.costs = match raw {
                        "uniform" => CostSource::Uniform,
                        "genre" => CostSource::Genre,
                        _ => return Err(bad(line, key, raw)),
                    }
                }
                "algorithms" => {
                    c.algorithms = raw
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| AlgorithmChoice::parse(s).ok_or_else(|| bad(line, key, s)))
                        .collect::<Result<_>>()?;
                }
                "algorithm.m" => c.removals = value(line, key, raw)?,
                "algorithm.removal_cost" => c.removal_cost = optional(line, key, raw)?,
                "algorithm.epsilon" => c.epsilon = value(line, key, raw)?,
                "algorithm.prune" => c.prune = value(line, key, raw)?,
                "algorithm.anchor" => {
                    c.anchor = match raw {
                        "removal-aware" => AnchorPolicy::RemovalAware,
                        "running-max" => AnchorPolicy::RunningMax,
                        _ => return Err(bad(line, key, raw)),
                    }
                }
                "baseline.gamma" => {
                    c.gamma = match raw {
                        "match" | "auto" => GammaPolicy::Match,
                        _ => GammaPolicy::Fixed(value(line, key, raw)?),
                    }
                }
                "baseline.theta" => c.theta = optional(line, key, raw)?,
                "removal.max_rounds" => c.max_rounds = value(line, key, raw)?,
                "removal.solver" => {
                    c.solver = OfflineSolver::parse(raw).ok_or_else(|| bad(line, key, raw))?
                }
                "removal.recompute_bound" => c.recompute_bound = value(line, key, raw)?,
                "cluster.machines" => c.machines = value(line, key, raw)?,
                "cluster.size_bound" => c.size_bound = optional(line, key, raw)?,
                "cluster.probability" => c.probability = optional(line, key, raw)?,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        if !saw_costs && !c.dataset.is_graph() {
            c.costs = CostSource::Genre;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(m));
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return fail(format!("K must be positive, got {}", self.budget));
        }
        if self.dims == 0 {
            return fail("d must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return fail(format!("ε must lie in (0, 1), got {}", self.epsilon));
        }
        if self.algorithms.is_empty() {
            return fail("no algorithms configured".into());
        }
        if self.costs == CostSource::Genre && self.dataset.is_graph() {
            return fail("genre costs need a movie dataset".into());
        }
        if self.costs == CostSource::Genre && self.dims > 2 {
            return fail("genre costs define two knapsacks".into());
        }
        if let GammaPolicy::Fixed(g) = self.gamma {
            if !(g >= 1.0) {
                return fail(format!("γ must be ≥ 1, got {g}"));
            }
        }
        if self.machines == 0 {
            return fail("at least one machine".into());
        }
        Ok(())
    }

    /// Total removal cost `M` for the size-robust grid.
    pub fn removal_cost(&self) -> f64 {
        self.removal_cost.unwrap_or(2.0 * self.removals as f64)
    }

    /// The effective configuration in the same format, for the record.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("seed", self.seed.to_string());
        line("dataset.kind", self.dataset.name().into());
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        if let Some(p) = path(&self.path) {
            line("dataset.path", p);
        }
        if let Some(p) = path(&self.ratings) {
            line("dataset.ratings", p);
        }
        if let Some(p) = path(&self.movies) {
            line("dataset.movies", p);
        }
        match self.sample {
            Some(Sample::Fraction(f)) => line("dataset.fraction", f.to_string()),
            Some(Sample::Cap(c)) => line("dataset.cap", c.to_string()),
            None => {}
        }
        line("dataset.vertices", self.vertices.to_string());
        line("dataset.links", self.links.to_string());
        line("dataset.triad", self.triad.to_string());
        line("dataset.catalogue", self.catalogue.to_string());
        line("dataset.users", self.users.to_string());
        line("dataset.per_user", self.per_user.to_string());
        line("objective.min_ratings", self.min_ratings.to_string());
        line("objective.genre_t", self.genre_t.to_string());
        line("constraint.d", self.dims.to_string());
        line("constraint.k", self.budget.to_string());
        line(
            "constraint.costs",
            match self.costs {
                CostSource::Uniform => "uniform".into(),
                CostSource::Genre => "genre".into(),
            },
        );
        line(
            "algorithms",
            self.algorithms.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
        );
        line("algorithm.m", self.removals.to_string());
        line("algorithm.removal_cost", self.removal_cost.map_or("auto".into(), |c| c.to_string()));
        line("algorithm.epsilon", self.epsilon.to_string());
        line("algorithm.prune", self.prune.to_string());
        line(
            "algorithm.anchor",
            match self.anchor {
                AnchorPolicy::RemovalAware => "removal-aware".into(),
                AnchorPolicy::RunningMax => "running-max".into(),
            },
        );
        line(
            "baseline.gamma",
            match self.gamma {
                GammaPolicy::Fixed(g) => g.to_string(),
                GammaPolicy::Match => "match".into(),
            },
        );
        line("baseline.theta", self.theta.map_or("auto".into(), |t| t.to_string()));
        line("removal.max_rounds", self.max_rounds.to_string());
        line("removal.solver", self.solver.name().into());
        line("removal.recompute_bound", self.recompute_bound.to_string());
        line("cluster.machines", self.machines.to_string());
        line("cluster.size_bound", self.size_bound.map_or("auto".into(), |l| l.to_string()));
        line("cluster.probability", self.probability.map_or("auto".into(), |p| p.to_string()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_experiments() {
        let c = ExperimentConfig::parse("").unwrap();
        assert_eq!(c.budget, 10.0);
        assert_eq!(c.dims, 1);
        assert_eq!(c.costs, CostSource::Uniform);
        assert_eq!(c.max_rounds, 30);
        let movies = ExperimentConfig::parse("dataset.kind = synthetic-movies").unwrap();
        assert_eq!(movies.costs, CostSource::Genre);
    }

    #[test]
    fn parses_sections_and_comments() {
        let text = "# experiment\nseed = 9\nconstraint.d = 2 # two knapsacks\n\nalgorithms = algmult, greedy\nbaseline.gamma = 1.5\ncluster.size_bound = 16\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.dims, 2);
        assert_eq!(
            c.algorithms,
            vec![AlgorithmChoice::Grid(Algorithm::Mult), AlgorithmChoice::RobustGreedy]
        );
        assert_eq!(c.gamma, GammaPolicy::Fixed(1.5));
        assert_eq!(c.size_bound, Some(16));
    }

    #[test]
    fn render_round_trips() {
        let text = "seed = 3\ndataset.kind = synthetic-movies\nconstraint.d = 2\nalgorithms = algmult,marginal-ratio\ndataset.cap = 50\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.render()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, line) in [
            ("seed = x", 1),
            ("\nunknown.key = 1", 2),
            ("no equals sign", 1),
            ("algorithms = algmult,bogus", 1),
        ] {
            match ExperimentConfig::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(ExperimentConfig::parse("constraint.k = 0").is_err());
        assert!(ExperimentConfig::parse("algorithm.epsilon = 1").is_err());
        assert!(ExperimentConfig::parse("constraint.costs = genre").is_err());
    }
}
