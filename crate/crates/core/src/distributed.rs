//! In-process simulation of the two-round sample-then-filter protocol.
//!
//! Round one: every element joins the sample `F` with probability `p`, the
//! ground set is split at random over `T` machines, and each machine builds
//! the grid `B₀` from `F` and sends the elements of its part that `B₀` (kept
//! frozen) would accept. Round two: the central machine rebuilds `B₀` and
//! continues it over the received elements, machine by machine.
//!
//! Sampled elements are never re-sent: each of them was already offered to
//! `B₀`. With that convention the central grid equals the sequential grid on
//! the stream `F ∥ R ∥ rest`, which [`sequential_reference`] builds.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, SubmodularFn};
use crate::streaming::{Algorithm, BucketGrid, GridParams};

/// Version tag written at the top of transcript files.
pub const TRANSCRIPT_FORMAT: &str = "# robust-knapsack transcript v1";

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    /// Number of machines `T`.
    pub machines: usize,
    /// Summary size bound `L`.
    pub size_bound: usize,
    pub seed: u64,
    /// Sampling probability; `min(1, 4√(L/n))` when absent.
    pub sample_probability: Option<f64>,
}

impl ClusterConfig {
    pub fn new(machines: usize, size_bound: usize, seed: u64) -> Self {
        Self {
            machines,
            size_bound,
            seed,
            sample_probability: None,
        }
    }

    /// `p` for a ground set of `n` elements.
    pub fn probability(&self, n: usize) -> f64 {
        match self.sample_probability {
            Some(p) => p,
            None if n == 0 => 1.0,
            None => (4.0 * (self.size_bound as f64 / n as f64).sqrt()).min(1.0),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::InvalidArgument("at least one machine".into()));
        }
        let p = self.probability(n);
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!("sampling probability {p} outside (0, 1]")));
        }
        Ok(())
    }
}

/// Samples `F` and splits `ground` into `T` parts, keeping arrival order.
pub fn partition_and_sample(
    ground: &[ElementId],
    config: &ClusterConfig,
) -> Result<(Vec<ElementId>, Vec<Vec<ElementId>>)> {
    config.validate(ground.len())?;
    let p = config.probability(ground.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut sample = Vec::new();
    let mut parts = vec![Vec::new(); config.machines];
    for &e in ground {
        if p >= 1.0 || rng.gen_bool(p) {
            sample.push(e);
        }
        parts[rng.gen_range(0..config.machines)].push(e);
    }
    Ok((sample, parts))
}

fn build_b0<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    params: &GridParams,
    sample: &[ElementId],
) -> Result<BucketGrid<F::State>> {
    if params.algorithm != Algorithm::Mult {
        return Err(Error::InvalidArgument(
            "the two-round protocol runs the multi-knapsack grid".into(),
        ));
    }
    if !instance.is_normalized() {
        return Err(Error::InvalidState("instance must be normalized".into()));
    }
    let mut grid = BucketGrid::new(params.clone(), eval);
    for &e in sample {
        grid.offer(eval, e, instance.costs(e))?;
    }
    Ok(grid)
}

/// Elements of `part` outside the sample that the frozen `B₀` would accept;
/// empty when `B₀` already holds at least `size_bound` elements.
pub fn round1_machine<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    b0: &BucketGrid<F::State>,
    sample: &HashSet<ElementId>,
    part: &[ElementId],
    size_bound: usize,
) -> Result<Vec<ElementId>> {
    if b0.element_count() >= size_bound {
        return Ok(Vec::new());
    }
    let mut sent = Vec::new();
    for &e in part {
        if sample.contains(&e) {
            continue;
        }
        if b0.would_accept(eval, e, instance.costs(e))?.is_some() {
            sent.push(e);
        }
    }
    Ok(sent)
}

/// Rebuilds `B₀` from the sample and continues it over `received`.
pub fn round2_central<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    params: &GridParams,
    sample: &[ElementId],
    received: &[ElementId],
) -> Result<BucketGrid<F::State>> {
    let mut grid = build_b0(eval, instance, params, sample)?;
    for &e in received {
        grid.offer(eval, e, instance.costs(e))?;
    }
    Ok(grid)
}

/// Work done by one machine in one phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineRecord {
    /// Machine index, or `None` for the central machine.
    pub machine: Option<usize>,
    pub phase: u8,
    pub elements_held: usize,
    pub elements_sent: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundTranscript {
    pub probability: f64,
    pub sample: Vec<ElementId>,
    pub parts: Vec<Vec<ElementId>>,
    pub sent: Vec<Vec<ElementId>>,
    /// Elements held by `B₀`.
    pub b0_size: usize,
    pub records: Vec<MachineRecord>,
}

impl RoundTranscript {
    /// `R = R_1 ∪ … ∪ R_T` in round-two order.
    pub fn received(&self) -> Vec<ElementId> {
        self.sent.concat()
    }

    /// Whether round one was short-circuited because `B₀` was already large.
    pub fn skipped_filter(&self, size_bound: usize) -> bool {
        self.b0_size >= size_bound
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{TRANSCRIPT_FORMAT}\nmachine,phase,elements_held,elements_sent\n");
        for r in &self.records {
            let machine = r.machine.map_or_else(|| "central".to_string(), |m| m.to_string());
            out.push_str(&format!(
                "{machine},{},{},{}\n",
                r.phase, r.elements_held, r.elements_sent
            ));
        }
        out
    }
}

/// Runs both rounds for one grid configuration.
pub fn run_two_round<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    ground: &[ElementId],
    params: &GridParams,
    config: &ClusterConfig,
) -> Result<(BucketGrid<F::State>, RoundTranscript)> {
    let (sample, parts) = partition_and_sample(ground, config)?;
    let b0 = build_b0(eval, instance, params, &sample)?;
    let in_sample: HashSet<ElementId> = sample.iter().copied().collect();
    let mut sent = Vec::with_capacity(parts.len());
    let mut records = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let r = round1_machine(eval, instance, &b0, &in_sample, part, config.size_bound)?;
        records.push(MachineRecord {
            machine: Some(i),
            phase: 1,
            elements_held: sample.len() + part.len() + r.len(),
            elements_sent: r.len(),
        });
        sent.push(r);
    }
    let received: Vec<ElementId> = sent.concat();
    let grid = round2_central(eval, instance, params, &sample, &received)?;
    records.push(MachineRecord {
        machine: None,
        phase: 2,
        elements_held: sample.len() + received.len(),
        elements_sent: 0,
    });
    let transcript = RoundTranscript {
        probability: config.probability(ground.len()),
        sample,
        parts,
        sent,
        b0_size: b0.element_count(),
        records,
    };
    Ok((grid, transcript))
}

/// Sequential grid on `F ∥ R ∥ rest`, where `rest` is the remaining ground
/// set in its original order.
pub fn sequential_reference<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    ground: &[ElementId],
    params: &GridParams,
    transcript: &RoundTranscript,
) -> Result<BucketGrid<F::State>> {
    let received = transcript.received();
    let mut grid = build_b0(eval, instance, params, &transcript.sample)?;
    let mut done: HashSet<ElementId> = transcript.sample.iter().copied().collect();
    for &e in &received {
        grid.offer(eval, e, instance.costs(e))?;
        done.insert(e);
    }
    for &e in ground {
        if done.insert(e) {
            grid.offer(eval, e, instance.costs(e))?;
        }
    }
    Ok(grid)
}
