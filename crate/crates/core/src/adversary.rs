//! Recursive-union removal adversary and per-round scoring.
//!
//! Round `k+1` removes everything the offline solver picks from each
//! algorithm's summary once the first `k` rounds are gone. The schedule is
//! built once and every algorithm is scored against it.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::{ElementId, Evaluator, KnapsackInstance, SubmodularFn};
use crate::offline::OfflineSolver;

/// Default cap on the number of removal rounds.
pub const DEFAULT_MAX_ROUNDS: usize = 30;

/// Version tag written at the top of score files.
pub const SCORES_FORMAT: &str = "# robust-knapsack scores v1";

/// Disjoint removal rounds `R_1, R_2, …`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RemovalSchedule {
    pub rounds: Vec<Vec<ElementId>>,
}

impl RemovalSchedule {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// `R_1 ∪ … ∪ R_k`, in round order.
    pub fn prefix(&self, k: usize) -> Vec<ElementId> {
        self.rounds[..k.min(self.rounds.len())].concat()
    }

    pub fn total_removed(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    /// Keeps the first `limit` removed elements, preserving round order.
    pub fn truncate(&self, limit: usize) -> RemovalSchedule {
        let mut left = limit;
        let mut rounds = Vec::new();
        for round in &self.rounds {
            if left == 0 {
                break;
            }
            let take = round.len().min(left);
            rounds.push(round[..take].to_vec());
            left -= take;
        }
        RemovalSchedule { rounds }
    }
}

/// Builds the schedule from each algorithm's stored elements.
pub fn build_removal_schedule<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    summaries: &[Vec<ElementId>],
    solver: OfflineSolver,
    max_rounds: usize,
) -> Result<RemovalSchedule> {
    let mut removed: BTreeSet<ElementId> = BTreeSet::new();
    let mut schedule = RemovalSchedule::default();
    while schedule.len() < max_rounds {
        let mut round: BTreeSet<ElementId> = BTreeSet::new();
        for summary in summaries {
            let left: Vec<ElementId> = summary
                .iter()
                .copied()
                .filter(|e| !removed.contains(e))
                .collect();
            if left.is_empty() {
                continue;
            }
            let picked = solver.solve(eval, instance, &left, None)?;
            round.extend(picked.elements.iter().filter(|e| !removed.contains(e)));
        }
        if round.is_empty() {
            break;
        }
        removed.extend(&round);
        schedule.rounds.push(round.into_iter().collect());
    }
    Ok(schedule)
}

/// Score of one algorithm after one removal round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundScore {
    pub algorithm: String,
    pub round: usize,
    pub removed_cumulative: usize,
    pub objective: f64,
    pub upper_bound: f64,
    pub ratio: f64,
    pub summary_size: usize,
}

/// Solves on `summary ∖ removed` under the instance budget and compares
/// with `upper_bound`. A zero bound with a zero value scores ratio one.
#[allow(clippy::too_many_arguments)]
pub fn score_round<F: SubmodularFn>(
    eval: &Evaluator<F>,
    instance: &KnapsackInstance,
    algorithm: &str,
    summary: &[ElementId],
    round: usize,
    removed: &[ElementId],
    solver: OfflineSolver,
    upper_bound: f64,
) -> Result<RoundScore> {
    let removed_set: BTreeSet<ElementId> = removed.iter().copied().collect();
    let left: Vec<ElementId> = summary
        .iter()
        .copied()
        .filter(|e| !removed_set.contains(e))
        .collect();
    let solution = solver.solve(eval, instance, &left, None)?;
    let value = solution.value;
    let ratio = if upper_bound > 0.0 {
        value / upper_bound
    } else if value > 0.0 {
        return Err(Error::InconsistentBound(format!(
            "{algorithm}: value {value} against a zero upper bound"
        )));
    } else {
        1.0
    };
    if ratio > 1.0 + 1e-9 {
        return Err(Error::InconsistentBound(format!(
            "{algorithm}: value {value} exceeds the upper bound {upper_bound}"
        )));
    }
    Ok(RoundScore {
        algorithm: algorithm.to_string(),
        round,
        removed_cumulative: removed_set.len(),
        objective: value,
        upper_bound,
        ratio,
        summary_size: summary.len(),
    })
}

/// Column order of the scores CSV.
pub const SCORES_COLUMNS: [&str; 7] = [
    "algorithm",
    "round",
    "removed_cumulative",
    "objective",
    "upper_bound",
    "ratio",
    "summary_size",
];

/// Scores as CSV, preceded by [`SCORES_FORMAT`]; the header is written even
/// when there are no rows.
pub fn scores_to_csv(scores: &[RoundScore]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer
        .write_record(SCORES_COLUMNS)
        .map_err(|e| Error::InvalidState(format!("csv: {e}")))?;
    for s in scores {
        writer
            .serialize(s)
            .map_err(|e| Error::InvalidState(format!("csv: {e}")))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::InvalidState(format!("csv: {e}")))?;
    let mut out = format!("{SCORES_FORMAT}\n");
    out.push_str(&String::from_utf8(body).map_err(|e| Error::InvalidState(e.to_string()))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Modular;

    fn abc() -> (Evaluator<Modular>, KnapsackInstance) {
        (
            Evaluator::new(Modular::new(vec![3.0, 2.0, 2.0])),
            KnapsackInstance::normalized_from_rows(vec![vec![2.0, 1.0, 1.0]], 2.0).unwrap(),
        )
    }

    #[test]
    fn schedule_example() {
        let (eval, inst) = abc();
        let one = vec![vec![0, 1, 2]];
        let s = build_removal_schedule(&eval, &inst, &one, OfflineSolver::BruteForce, 30).unwrap();
        assert_eq!(s.rounds, vec![vec![1, 2], vec![0]]);
        let twice = vec![vec![0, 1, 2], vec![2, 1, 0]];
        let t = build_removal_schedule(&eval, &inst, &twice, OfflineSolver::BruteForce, 30).unwrap();
        assert_eq!(s, t);
        let none: Vec<Vec<ElementId>> = vec![vec![]];
        assert!(build_removal_schedule(&eval, &inst, &none, OfflineSolver::Greedy, 30)
            .unwrap()
            .is_empty());
        let capped = build_removal_schedule(&eval, &inst, &one, OfflineSolver::BruteForce, 1).unwrap();
        assert_eq!(capped.len(), 1);
        assert_eq!(s.truncate(1).rounds, vec![vec![1]]);
        assert_eq!(s.prefix(2), vec![1, 2, 0]);
    }

    #[test]
    fn scoring() {
        let (eval, inst) = abc();
        let summary = vec![0, 1, 2];
        let s = score_round(&eval, &inst, "a", &summary, 0, &[], OfflineSolver::BruteForce, 8.0).unwrap();
        assert_eq!(s.objective, 4.0);
        assert_eq!(s.ratio, 0.5);
        let gone =
            score_round(&eval, &inst, "a", &summary, 1, &[0, 1, 2], OfflineSolver::Greedy, 8.0).unwrap();
        assert_eq!(gone.objective, 0.0);
        assert_eq!(gone.removed_cumulative, 3);
        assert!(matches!(
            score_round(&eval, &inst, "a", &summary, 0, &[], OfflineSolver::Greedy, 0.0),
            Err(Error::InconsistentBound(_))
        ));
        let csv = scores_to_csv(&[s]).unwrap();
        assert!(csv.starts_with(SCORES_FORMAT));
        assert!(csv.contains("algorithm,round,removed_cumulative,objective,upper_bound,ratio,summary_size"));
        assert_eq!(scores_to_csv(&[]).unwrap().lines().count(), 2);
    }
}
