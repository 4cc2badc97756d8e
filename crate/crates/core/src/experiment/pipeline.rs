//! Dataset preparation, summary construction, scoring and the two-round run.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{build_removal_schedule, score_round, RemovalSchedule, RoundScore};
use crate::distributed::{run_two_round, sequential_reference, ClusterConfig, RoundTranscript};
use crate::error::{Error, Result};
use crate::ingest::{
    load_movielens, load_snap_edges, pick_user, subsample_graph, subsample_movies,
    synthetic_ratings, synthetic_social_graph,
};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, SubmodularFn};
use crate::objectives::{
    genre_cost, uniform_random_costs, DominatingSet, GenreCostSpec, MovieCoverage, RatingsModel,
};
use crate::offline::{
    brute_force_opt, certified_upper_bound, offline_greedy, BaselineFactory, OfflineSolver,
    BRUTE_FORCE_LIMIT,
};
use crate::streaming::{
    ceil_log2, flatten, parse_summaries, prune_all, run_ladder, write_summaries, Algorithm,
    GridParams, GuessLadder, RobustSummary, SummaryEntry,
};

use super::config::{AlgorithmChoice, CostSource, DatasetKind, ExperimentConfig, GammaPolicy};

/// Version tag written at the top of summary files.
pub const SUMMARY_FORMAT: &str = "# robust-knapsack summaries v1";

/// Relative tolerance when matching summary sizes.
pub const SIZE_TOLERANCE: f64 = 0.2;

/// Bisection steps when matching summary sizes.
pub const GAMMA_STEPS: usize = 8;

/// Objective, instance and stream of one experiment.
#[derive(Debug)]
pub struct Workload<F> {
    pub eval: Evaluator<F>,
    pub instance: KnapsackInstance,
    /// Admissible elements in arrival order.
    pub stream: Vec<ElementId>,
    /// One-line description of the dataset.
    pub label: String,
}

#[derive(Debug)]
pub enum PreparedWorkload {
    Graph(Workload<DominatingSet>),
    Movies(Workload<MovieCoverage>),
}

/// Independent seeds for each random stage, drawn in a fixed order.
#[derive(Clone, Copy, Debug)]
pub struct StageSeeds {
    pub dataset: u64,
    pub sample: u64,
    pub costs: u64,
    pub user: u64,
    pub cluster: u64,
}

impl StageSeeds {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            dataset: rng.next_u64(),
            sample: rng.next_u64(),
            costs: rng.next_u64(),
            user: rng.next_u64(),
            cluster: rng.next_u64(),
        }
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidArgument(format!("{what} is not set"))
}

fn genre_rows(model: &RatingsModel, dims: usize, t: u32) -> Vec<Vec<f64>> {
    [GenreCostSpec::first_knapsack(), GenreCostSpec::second_knapsack()]
        .into_iter()
        .take(dims)
        .map(|mut spec| {
            spec.t = t;
            model.genres.iter().map(|g| genre_cost(g, &spec)).collect()
        })
        .collect()
}

fn workload<F: SubmodularFn>(f: F, rows: Vec<Vec<f64>>, budget: f64, label: String) -> Result<Workload<F>> {
    let instance = KnapsackInstance::normalized_from_rows(rows, budget)?;
    let stream = instance.stream();
    Ok(Workload {
        eval: Evaluator::new(f),
        instance,
        stream,
        label,
    })
}

/// Loads or generates the dataset and attaches objective and costs.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedWorkload> {
    config.validate()?;
    let seeds = StageSeeds::new(config.seed);
    if config.dataset.is_graph() {
        let graph = match config.dataset {
            DatasetKind::Snap => {
                let path = config.path.as_ref().ok_or_else(|| missing("dataset.path"))?;
                load_snap_edges(path)?.0
            }
            _ => synthetic_social_graph(config.vertices, config.links, config.triad, seeds.dataset),
        };
        let graph = match config.sample {
            Some(sample) => subsample_graph(&graph, sample, seeds.sample)?.0,
            None => graph,
        };
        let n = graph.vertex_count();
        let label = format!(
            "{} graph, {} vertices, {} edges",
            config.dataset.name(),
            n,
            graph.edge_count()
        );
        let rows = uniform_random_costs(n, config.dims, seeds.costs);
        let f = DominatingSet::new(Arc::new(graph));
        return Ok(PreparedWorkload::Graph(workload(f, rows, config.budget, label)?));
    }
    let model = match config.dataset {
        DatasetKind::MovieLens => {
            let ratings = config.ratings.as_ref().ok_or_else(|| missing("dataset.ratings"))?;
            let movies = config.movies.as_ref().ok_or_else(|| missing("dataset.movies"))?;
            load_movielens(ratings, movies)?.0
        }
        _ => synthetic_ratings(config.catalogue, config.users, config.per_user, seeds.dataset),
    };
    let model = match config.sample {
        Some(sample) => subsample_movies(&model, sample, seeds.sample)?,
        None => model,
    };
    let (user, targets) = pick_user(&model, config.min_ratings, seeds.user)?;
    let label = format!(
        "{} catalogue, {} movies, user {} with {} ratings",
        config.dataset.name(),
        model.len(),
        user,
        targets.len()
    );
    let rows = match config.costs {
        CostSource::Genre => genre_rows(&model, config.dims, config.genre_t),
        CostSource::Uniform => uniform_random_costs(model.len(), config.dims, seeds.costs),
    };
    let f = MovieCoverage::new(&model, targets);
    Ok(PreparedWorkload::Movies(workload(f, rows, config.budget, label)?))
}

/// Grid parameters for `algorithm` with a placeholder estimate.
pub fn grid_template(config: &ExperimentConfig, algorithm: Algorithm) -> Result<GridParams> {
    match algorithm {
        Algorithm::Mult => GridParams::mult(config.dims, config.removals, config.budget, 1.0),
        _ if config.dims != 1 => Err(Error::InvalidArgument(format!(
            "{} handles one knapsack",
            algorithm.name()
        ))),
        Algorithm::Num => GridParams::num(config.removals, config.budget, 1.0),
        Algorithm::Size => GridParams::size_from_estimate(config.removal_cost(), config.budget, 1.0),
    }
}

/// Summaries of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmBuild {
    pub algorithm: AlgorithmChoice,
    /// Capacity inflation used by a baseline.
    pub gamma: Option<f64>,
    pub summaries: Vec<RobustSummary>,
}

impl AlgorithmBuild {
    pub fn name(&self) -> &'static str {
        self.algorithm.name()
    }

    /// Every element the algorithm stores.
    pub fn elements(&self) -> Vec<ElementId> {
        flatten(&self.summaries)
    }

    pub fn size(&self) -> usize {
        self.elements().len()
    }
}

/// Runs one grid ladder over the stream, pruned when configured.
pub fn build_grid<F: SubmodularFn>(
    w: &Workload<F>,
    config: &ExperimentConfig,
    algorithm: Algorithm,
) -> Result<Vec<RobustSummary>> {
    let template = grid_template(config, algorithm)?;
    let ladder = run_ladder(&w.eval, &w.instance, &template, config.epsilon, config.anchor, &w.stream)?;
    let summaries = ladder.summaries();
    if config.prune {
        prune_all(&w.eval, &template, &summaries)
    } else {
        Ok(summaries)
    }
}

fn build_baseline<F: SubmodularFn>(
    w: &Workload<F>,
    config: &ExperimentConfig,
    choice: AlgorithmChoice,
    gamma: f64,
) -> Result<Vec<RobustSummary>> {
    match choice {
        AlgorithmChoice::Baseline(kind) => {
            let mut factory =
                BaselineFactory::new(kind, gamma, config.budget, config.dims, config.removals)?;
            factory.theta = config.theta;
            let mut ladder = GuessLadder::new(factory, config.epsilon, config.anchor)?;
            for &e in &w.stream {
                ladder.offer(&w.eval, e, w.instance.costs(e))?;
            }
            Ok(ladder.summaries())
        }
        AlgorithmChoice::RobustGreedy => {
            if config.dims != 1 {
                return Err(Error::InvalidArgument("greedy handles one knapsack".into()));
            }
            let solution = offline_greedy(&w.eval, &w.instance, &w.stream, Some(gamma * config.budget));
            Ok(vec![RobustSummary {
                tau_star: solution.value,
                partition_count: 1,
                entries: solution
                    .elements
                    .iter()
                    .map(|&e| SummaryEntry {
                        element: e,
                        partition: 0,
                        bucket: 0,
                        costs: w.instance.costs(e).to_vec(),
                    })
                    .collect(),
            }])
        }
        AlgorithmChoice::Grid(_) => unreachable!("grid algorithms have no inflation"),
    }
}

/// Inflation whose summary size is closest to `target`: doubling until the
/// size reaches the target, then bisection, stopping early once within
/// [`SIZE_TOLERANCE`].
pub fn match_gamma(target: usize, mut size_at: impl FnMut(f64) -> Result<usize>) -> Result<(f64, usize)> {
    let within = |s: usize| (s as f64 - target as f64).abs() <= SIZE_TOLERANCE * target as f64;
    let mut best = (1.0, size_at(1.0)?);
    let closer = |best: &mut (f64, usize), g: f64, s: usize| {
        if s.abs_diff(target) < best.1.abs_diff(target) {
            *best = (g, s);
        }
    };
    if within(best.1) || best.1 >= target {
        return Ok(best);
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut reached = false;
    for _ in 0..16 {
        let s = size_at(hi)?;
        closer(&mut best, hi, s);
        if within(s) {
            return Ok(best);
        }
        if s >= target {
            reached = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !reached {
        return Ok(best);
    }
    for _ in 0..GAMMA_STEPS {
        let mid = 0.5 * (lo + hi);
        let s = size_at(mid)?;
        closer(&mut best, mid, s);
        if within(s) {
            break;
        }
        if s < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Builds every configured algorithm. Grid algorithms run first; the
/// baselines' inflation is then fixed or matched to the multi-knapsack
/// summary size (or the first grid algorithm's).
pub fn build_all<F: SubmodularFn>(w: &Workload<F>, config: &ExperimentConfig) -> Result<Vec<AlgorithmBuild>> {
    let mut grids = Vec::new();
    for &choice in &config.algorithms {
        if let AlgorithmChoice::Grid(a) = choice {
            grids.push(AlgorithmBuild {
                algorithm: choice,
                gamma: None,
                summaries: build_grid(w, config, a)?,
            });
        }
    }
    let target = grids
        .iter()
        .find(|b| b.algorithm == AlgorithmChoice::Grid(Algorithm::Mult))
        .or(grids.first())
        .map(AlgorithmBuild::size);
    let mut out = Vec::new();
    let mut grids = grids.into_iter();
    for &choice in &config.algorithms {
        if let AlgorithmChoice::Grid(_) = choice {
            out.extend(grids.next());
            continue;
        }
        let gamma = match (config.gamma, target) {
            (GammaPolicy::Fixed(g), _) => g,
            (GammaPolicy::Match, None) => 1.0,
            (GammaPolicy::Match, Some(target)) => {
                match_gamma(target, |g| Ok(flatten(&build_baseline(w, config, choice, g)?).len()))?.0
            }
        };
        out.push(AlgorithmBuild {
            algorithm: choice,
            gamma: Some(gamma),
            summaries: build_baseline(w, config, choice, gamma)?,
        });
    }
    Ok(out)
}

/// `algorithm,summary_size[,gamma]` rows.
pub fn build_stats_csv(builds: &[AlgorithmBuild]) -> String {
    let mut out = String::from("algorithm,summary_size,gamma\n");
    for b in builds {
        let gamma = b.gamma.map_or(String::new(), |g| g.to_string());
        let _ = writeln!(out, "{},{},{}", b.name(), b.size(), gamma);
    }
    out
}

/// A persisted build of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryFile {
    pub algorithm: AlgorithmChoice,
    pub budget: f64,
    pub dims: usize,
    pub gamma: Option<f64>,
    pub summaries: Vec<RobustSummary>,
}

impl SummaryFile {
    pub fn new(build: &AlgorithmBuild, config: &ExperimentConfig) -> Self {
        Self {
            algorithm: build.algorithm,
            budget: config.budget,
            dims: config.dims,
            gamma: build.gamma,
            summaries: build.summaries.clone(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{SUMMARY_FORMAT}\n# algorithm {}\n# k {}\n# d {}\n",
            self.algorithm.name(),
            self.budget,
            self.dims
        );
        if let Some(g) = self.gamma {
            let _ = writeln!(out, "# gamma {g}");
        }
        out.push_str(&write_summaries(&self.summaries));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut algorithm = None;
        let mut budget = None;
        let mut dims = None;
        let mut gamma = None;
        for (k, raw) in text.lines().enumerate() {
            let Some(meta) = raw.trim().strip_prefix('#') else {
                continue;
            };
            let bad = |what: &str| Error::Parse {
                line: k + 1,
                message: format!("bad {what}"),
            };
            let mut tokens = meta.split_whitespace();
            match (tokens.next(), tokens.next()) {
                (Some("algorithm"), Some(v)) => {
                    algorithm = Some(AlgorithmChoice::parse(v).ok_or_else(|| bad("algorithm"))?)
                }
                (Some("k"), Some(v)) => budget = Some(v.parse().map_err(|_| bad("budget"))?),
                (Some("d"), Some(v)) => dims = Some(v.parse().map_err(|_| bad("dimension"))?),
                (Some("gamma"), Some(v)) => gamma = Some(v.parse().map_err(|_| bad("inflation"))?),
                _ => {}
            }
        }
        let need = |what: &str| Error::Parse {
            line: 0,
            message: format!("summary file has no {what} line"),
        };
        let file = Self {
            algorithm: algorithm.ok_or_else(|| need("algorithm"))?,
            budget: budget.ok_or_else(|| need("k"))?,
            dims: dims.ok_or_else(|| need("d"))?,
            gamma,
            summaries: parse_summaries(text)?,
        };
        if let Some(s) = file
            .summaries
            .iter()
            .flat_map(|s| &s.entries)
            .find(|e| e.costs.len() != file.dims)
        {
            return Err(Error::InvalidInstance(format!(
                "element {} has {} cost entries but the file declares d = {}",
                s.element,
                s.costs.len(),
                file.dims
            )));
        }
        Ok(file)
    }

    /// Fails unless the file was built for the same constraint and ground set.
    pub fn check_against(&self, config: &ExperimentConfig, instance: &KnapsackInstance) -> Result<()> {
        if self.budget != config.budget || self.dims != config.dims {
            return Err(Error::InvalidArgument(format!(
                "{} summary was built for K = {}, d = {} but the config has K = {}, d = {}",
                self.algorithm.name(),
                self.budget,
                self.dims,
                config.budget,
                config.dims
            )));
        }
        for entry in self.summaries.iter().flat_map(|s| &s.entries) {
            if entry.element as usize >= instance.len() || instance.costs(entry.element) != entry.costs.as_slice() {
                return Err(Error::InvalidArgument(format!(
                    "{} summary element {} does not match the configured dataset",
                    self.algorithm.name(),
                    entry.element
                )));
            }
        }
        Ok(())
    }

    pub fn into_build(self) -> AlgorithmBuild {
        AlgorithmBuild {
            algorithm: self.algorithm,
            gamma: self.gamma,
            summaries: self.summaries,
        }
    }
}

/// Scores of every algorithm against one shared schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub schedule: RemovalSchedule,
    pub scores: Vec<RoundScore>,
}

/// Upper bound on the optimum over `candidates`: exact by enumeration when
/// the brute-force solver is configured and the set is small enough,
/// certified by greedy otherwise.
pub fn upper_bound<F: SubmodularFn>(
    w: &Workload<F>,
    solver: OfflineSolver,
    candidates: &[ElementId],
) -> Result<f64> {
    if solver == OfflineSolver::BruteForce && candidates.len() <= BRUTE_FORCE_LIMIT {
        Ok(brute_force_opt(&w.eval, &w.instance, candidates, None)?.value)
    } else {
        Ok(certified_upper_bound(&w.eval, &w.instance, candidates))
    }
}

/// Builds the shared removal schedule and scores every algorithm after
/// every round, round 0 being the untouched summary. No rounds are scored
/// when `max_rounds` is zero.
pub fn evaluate_builds<F: SubmodularFn>(
    w: &Workload<F>,
    config: &ExperimentConfig,
    builds: &[AlgorithmBuild],
) -> Result<Evaluation> {
    if config.max_rounds == 0 {
        return Ok(Evaluation {
            schedule: RemovalSchedule::default(),
            scores: Vec::new(),
        });
    }
    let elements: Vec<Vec<ElementId>> = builds.iter().map(AlgorithmBuild::elements).collect();
    let schedule = build_removal_schedule(&w.eval, &w.instance, &elements, config.solver, config.max_rounds)?;
    let fixed = upper_bound(w, config.solver, &w.stream)?;
    let mut scores = Vec::new();
    for round in 0..=schedule.len() {
        let removed = schedule.prefix(round);
        let bound = if config.recompute_bound {
            let left: Vec<ElementId> = w.stream.iter().copied().filter(|e| !removed.contains(e)).collect();
            upper_bound(w, config.solver, &left)?
        } else {
            fixed
        };
        for (build, elements) in builds.iter().zip(&elements) {
            scores.push(score_round(
                &w.eval,
                &w.instance,
                build.name(),
                elements,
                round,
                &removed,
                config.solver,
                bound,
            )?);
        }
    }
    Ok(Evaluation { schedule, scores })
}

/// `⌈(K log³K + m log⁴K)/ε⌉` with base-2 logarithms, at least one.
pub fn default_size_bound(budget: f64, removals: usize, epsilon: f64) -> usize {
    let l = ceil_log2(budget).max(1) as f64;
    let raw = (budget * l.powi(3) + removals as f64 * l.powi(4)) / epsilon;
    (raw.ceil() as usize).max(1)
}

/// One protocol run for one estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessRun {
    pub tau_star: f64,
    pub transcript: RoundTranscript,
    pub summary_size: usize,
    /// The central grid equals the sequential grid on `F ∥ R ∥ rest`.
    pub equivalent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributedReport {
    pub size_bound: usize,
    pub runs: Vec<GuessRun>,
}

impl DistributedReport {
    pub fn all_equivalent(&self) -> bool {
        self.runs.iter().all(|r| r.equivalent)
    }

    /// One line per estimate plus the overall verdict.
    pub fn render(&self) -> String {
        let mut out = format!("size_bound {}\n", self.size_bound);
        for (j, r) in self.runs.iter().enumerate() {
            let _ = writeln!(
                out,
                "guess {j} tau_star {} p {} sample {} b0 {} received {} summary {} equivalence {}",
                r.tau_star,
                r.transcript.probability,
                r.transcript.sample.len(),
                r.transcript.b0_size,
                r.transcript.received().len(),
                r.summary_size,
                if r.equivalent { "pass" } else { "fail" }
            );
        }
        let _ = writeln!(
            out,
            "equivalence {}",
            if self.all_equivalent() { "pass" } else { "fail" }
        );
        out
    }
}

/// Runs the two-round protocol for every live estimate of the sequential
/// multi-knapsack ladder and checks each against the sequential grid.
pub fn run_distributed<F: SubmodularFn>(w: &Workload<F>, config: &ExperimentConfig) -> Result<DistributedReport> {
    let template = grid_template(config, Algorithm::Mult)?;
    let ladder = run_ladder(&w.eval, &w.instance, &template, config.epsilon, config.anchor, &w.stream)?;
    let size_bound = config
        .size_bound
        .unwrap_or_else(|| default_size_bound(config.budget, config.removals, config.epsilon));
    let mut cluster = ClusterConfig::new(config.machines, size_bound, StageSeeds::new(config.seed).cluster);
    cluster.sample_probability = config.probability;
    let mut runs = Vec::new();
    for (tau_star, _) in ladder.sketches() {
        let params = template.with_tau_star(tau_star)?;
        let (grid, transcript) = run_two_round(&w.eval, &w.instance, &w.stream, &params, &cluster)?;
        let reference = sequential_reference(&w.eval, &w.instance, &w.stream, &params, &transcript)?;
        runs.push(GuessRun {
            tau_star,
            summary_size: grid.element_count(),
            equivalent: grid.snapshot() == reference.snapshot(),
            transcript,
        });
    }
    Ok(DistributedReport { size_bound, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn stage_seeds_differ() {
        let s = StageSeeds::new(1);
        assert_ne!(s.dataset, s.costs);
        assert_eq!(StageSeeds::new(1).cluster, s.cluster);
    }

    #[test]
    fn gamma_matching() {
        // Size grows linearly with γ.
        let (g, s) = match_gamma(100, |g| Ok((40.0 * g) as usize)).unwrap();
        assert!((s as f64 - 100.0).abs() <= 20.0, "{g} {s}");
        // Already too large at γ = 1.
        assert_eq!(match_gamma(10, |_| Ok(50)).unwrap(), (1.0, 50));
        // Never large enough: the closest size wins.
        let (_, s) = match_gamma(1000, |g| Ok((g.min(8.0) * 10.0) as usize)).unwrap();
        assert_eq!(s, 80);
    }

    #[test]
    fn graph_pipeline_is_deterministic() {
        let config = small("dataset.vertices = 150\ndataset.links = 4\nremoval.max_rounds = 4\nalgorithms = algmult,algnum,marginal-ratio,greedy");
        let run = || {
            let PreparedWorkload::Graph(w) = prepare(&config).unwrap() else {
                panic!("graph expected")
            };
            let builds = build_all(&w, &config).unwrap();
            let eval = evaluate_builds(&w, &config, &builds).unwrap();
            (build_stats_csv(&builds), eval)
        };
        let (stats, eval) = run();
        assert_eq!(run(), (stats.clone(), eval.clone()));
        assert_eq!(stats.lines().count(), 5);
        assert!(!eval.schedule.is_empty());
        assert!(eval.scores.iter().all(|s| s.ratio <= 1.0 + 1e-9));
        assert_eq!(eval.scores.len(), 4 * (eval.schedule.len() + 1));
    }

    #[test]
    fn movie_pipeline_with_two_knapsacks() {
        let config = small("dataset.kind = synthetic-movies\ndataset.catalogue = 120\ndataset.users = 60\nconstraint.d = 2\nremoval.max_rounds = 3\nalgorithms = algmult,multidimensional,marginal-ratio");
        let PreparedWorkload::Movies(w) = prepare(&config).unwrap() else {
            panic!("movies expected")
        };
        assert_eq!(w.instance.dims(), 2);
        let builds = build_all(&w, &config).unwrap();
        assert_eq!(builds.len(), 3);
        let eval = evaluate_builds(&w, &config, &builds).unwrap();
        assert!(eval.scores.iter().all(|s| s.ratio <= 1.0 + 1e-9));
    }

    #[test]
    fn single_knapsack_algorithms_refuse_two() {
        let config = small("constraint.d = 2\nalgorithms = algnum");
        assert!(grid_template(&config, Algorithm::Num).is_err());
        assert!(grid_template(&config, Algorithm::Mult).is_ok());
    }

    #[test]
    fn zero_rounds_scores_nothing() {
        let config = small("dataset.vertices = 60\nremoval.max_rounds = 0\nalgorithms = algmult");
        let PreparedWorkload::Graph(w) = prepare(&config).unwrap() else {
            panic!()
        };
        let builds = build_all(&w, &config).unwrap();
        assert!(evaluate_builds(&w, &config, &builds).unwrap().scores.is_empty());
    }

    #[test]
    fn summary_file_round_trip_and_mismatch() {
        let config = small("dataset.vertices = 80\nalgorithms = algmult,marginal-ratio");
        let PreparedWorkload::Graph(w) = prepare(&config).unwrap() else {
            panic!()
        };
        for build in build_all(&w, &config).unwrap() {
            let file = SummaryFile::new(&build, &config);
            let parsed = SummaryFile::parse(&file.render()).unwrap();
            assert_eq!(parsed, file);
            parsed.check_against(&config, &w.instance).unwrap();
            let other = small("dataset.vertices = 80\nconstraint.k = 8");
            assert!(parsed.check_against(&other, &w.instance).is_err());
        }
        assert!(SummaryFile::parse("1 2\n").is_err());
    }

    #[test]
    fn distributed_with_one_machine_and_full_sample() {
        let config = small("dataset.vertices = 120\ncluster.machines = 1\ncluster.probability = 1");
        let PreparedWorkload::Graph(w) = prepare(&config).unwrap() else {
            panic!()
        };
        let report = run_distributed(&w, &config).unwrap();
        assert!(!report.runs.is_empty());
        assert!(report.all_equivalent());
        assert!(report.render().ends_with("equivalence pass\n"));
    }

    #[test]
    fn size_bound_formula() {
        // K = 8: ℓ = 3, (8·27 + 2·81)/0.5 = 756.
        assert_eq!(default_size_bound(8.0, 2, 0.5), 756);
    }
}
