use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// How values map to ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDirection {
    /// Highest value gets rank 1.
    Performance,
    /// Highest value gets rank M, so more exploration ranks higher.
    OeReversed,
}

impl FromStr for RankDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "performance" => Ok(RankDirection::Performance),
            "oe" => Ok(RankDirection::OeReversed),
            other => invalid(format!("unknown rank direction {other:?}, expected performance or oe")),
        }
    }
}

/// Mean ranks across problems, per method and per `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub problems: Vec<String>,
    pub t: Vec<usize>,
    /// `mean_rank[m][i]` is the mean rank of method `m` at `t[i]`.
    pub mean_rank: Vec<Vec<f64>>,
    pub direction: RankDirection,
}

impl RankTable {
    pub fn method_index(&self, method: &str) -> Option<usize> {
        self.methods.iter().position(|m| m == method)
    }

    /// Mean rank of `method` at the last `t`.
    pub fn terminal(&self, method: &str) -> Option<f64> {
        self.method_index(method).and_then(|i| self.mean_rank[i].last().copied())
    }
}

/// Fractional ranks with rank 1 for the largest value; ties share their average rank.
pub fn fractional_ranks_desc(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Rank methods on each problem at every `t`, then average the ranks over problems.
///
/// `scores[problem][method]` is a series aligned with `t`.
pub fn mean_relative_ranking(scores: &BTreeMap<String, BTreeMap<String, Vec<f64>>>, t: &[usize], direction: RankDirection) -> Result<RankTable> {
    if scores.is_empty() || t.is_empty() {
        return invalid("ranking needs at least one problem and one t value");
    }
    let methods: Vec<String> = scores.values().flat_map(|row| row.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let problems: Vec<String> = scores.keys().cloned().collect();
    let m = methods.len();
    let mut sums = vec![vec![0.0; t.len()]; m];
    for (problem, row) in scores {
        for method in &methods {
            match row.get(method) {
                None => return invalid(format!("missing value for method {method} on problem {problem}")),
                Some(s) if s.len() != t.len() => {
                    return invalid(format!("method {method} on problem {problem} has {} values, expected {}", s.len(), t.len()))
                }
                Some(s) if s.iter().any(|v| v.is_nan()) => return invalid(format!("NaN score for method {method} on problem {problem}")),
                _ => {}
            }
        }
        for i in 0..t.len() {
            let vals: Vec<f64> = methods.iter().map(|mt| row[mt][i]).collect();
            let ranks = fractional_ranks_desc(&vals);
            for (k, r) in ranks.into_iter().enumerate() {
                let r = match direction {
                    RankDirection::Performance => r,
                    RankDirection::OeReversed => (m + 1) as f64 - r,
                };
                sums[k][i] += r;
            }
        }
    }
    let p = problems.len() as f64;
    let mean_rank = sums.into_iter().map(|row| row.into_iter().map(|v| v / p).collect()).collect();
    Ok(RankTable { methods, problems, t: t.to_vec(), mean_rank, direction })
}
