//! Flattened grid contents and their text format.
//!
//! A summary file holds one or more blocks. Each block starts with a header
//! line `tau_star partition_count` followed by one line per element:
//! `id partition bucket cost_0 [cost_1 ...]`. Floats are written with their
//! shortest round-trip representation, so parsing restores them exactly.
//! Lines starting with `#` are comments.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::objective::ElementId;

/// One stored element and where it sits in the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryEntry {
    pub element: ElementId,
    pub partition: usize,
    pub bucket: usize,
    pub costs: Vec<f64>,
}

/// Contents of one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustSummary {
    pub tau_star: f64,
    pub partition_count: usize,
    pub entries: Vec<SummaryEntry>,
}

impl RobustSummary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored elements in grid order.
    pub fn elements(&self) -> Vec<ElementId> {
        self.entries.iter().map(|e| e.element).collect()
    }

    /// Elements of bucket `(partition, bucket)` in insertion order.
    pub fn bucket(&self, partition: usize, bucket: usize) -> Vec<ElementId> {
        self.entries
            .iter()
            .filter(|e| e.partition == partition && e.bucket == bucket)
            .map(|e| e.element)
            .collect()
    }
}

/// Union of the elements stored across several summaries, sorted.
pub fn flatten(summaries: &[RobustSummary]) -> Vec<ElementId> {
    summaries
        .iter()
        .flat_map(|s| s.entries.iter().map(|e| e.element))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn write_summaries(summaries: &[RobustSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        let _ = writeln!(out, "{} {}", s.tau_star, s.partition_count);
        for e in &s.entries {
            let _ = write!(out, "{} {} {}", e.element, e.partition, e.bucket);
            for c in &e.costs {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
    }
    out
}

fn parse_token<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {what} `{token}`"),
    })
}

pub fn parse_summaries(text: &str) -> Result<Vec<RobustSummary>> {
    let mut out: Vec<RobustSummary> = Vec::new();
    let mut dims: Option<usize> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens.len() {
            2 => {
                let tau_star: f64 = parse_token(tokens[0], line, "estimate")?;
                let partition_count: usize = parse_token(tokens[1], line, "partition count")?;
                out.push(RobustSummary {
                    tau_star,
                    partition_count,
                    entries: Vec::new(),
                });
            }
            n if n >= 4 => {
                let Some(current) = out.last_mut() else {
                    return Err(Error::Parse {
                        line,
                        message: "element line before any header".into(),
                    });
                };
                let costs = tokens[3..]
                    .iter()
                    .map(|t| parse_token::<f64>(t, line, "cost"))
                    .collect::<Result<Vec<_>>>()?;
                if *dims.get_or_insert(costs.len()) != costs.len() {
                    return Err(Error::Parse {
                        line,
                        message: "inconsistent number of cost columns".into(),
                    });
                }
                let entry = SummaryEntry {
                    element: parse_token(tokens[0], line, "element id")?,
                    partition: parse_token(tokens[1], line, "partition")?,
                    bucket: parse_token(tokens[2], line, "bucket")?,
                    costs,
                };
                if entry.partition >= current.partition_count {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "partition {} outside 0..{}",
                            entry.partition, current.partition_count
                        ),
                    });
                }
                current.entries.push(entry);
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected a header or an element line, got `{body}`"),
                })
            }
        }
    }
    Ok(out)
}
