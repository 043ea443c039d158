use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::metrics::{self, MetricKind};
use crate::trace::ObservationTrace;

/// Per-prefix quantity computed from a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Metric(MetricKind),
    /// Highest objective value observed so far.
    BestValue,
}

impl Measure {
    /// `(first_t, values)` for one trace.
    pub fn series(self, trace: &ObservationTrace) -> Result<(usize, Vec<f64>)> {
        match self {
            Measure::Metric(kind) => metrics::series(trace, kind).map(|s| (s.first_t, s.values)),
            Measure::BestValue if trace.is_empty() => invalid("empty trace"),
            Measure::BestValue => Ok((1, trace.running_best())),
        }
    }
}

/// Mean series with its standard error, on the grid `t = first_t ..`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSeries {
    pub first_t: usize,
    pub mean: Vec<f64>,
    pub sem: Vec<f64>,
}

impl MeanSeries {
    pub fn terminal(&self) -> f64 {
        *self.mean.last().expect("aggregated series are never empty")
    }

    pub fn terminal_sem(&self) -> f64 {
        *self.sem.last().expect("aggregated series are never empty")
    }

    pub fn t_values(&self) -> Vec<usize> {
        (self.first_t..self.first_t + self.mean.len()).collect()
    }
}

/// Mean and standard error of the mean across equal-length rows, column by column.
pub fn mean_and_sem(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let len = rows[0].len();
    let mut mean = vec![0.0; len];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let sem = if rows.len() < 2 {
        vec![0.0; len]
    } else {
        (0..len)
            .map(|j| {
                let ss: f64 = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
                (ss / (n - 1.0) / n).sqrt()
            })
            .collect()
    };
    (mean, sem)
}

fn sort_key(t: &ObservationTrace) -> (String, u64, String, String, Vec<u64>) {
    let bits = t.values().iter().map(|v| v.to_bits()).collect();
    (t.meta.benchmark.clone(), t.meta.seed, t.meta.af.clone(), t.meta.variant.clone(), bits)
}

/// Per-benchmark seed averages of a metric, then their average across benchmarks.
///
/// The standard error combines the per-benchmark seed standard errors as
/// `sqrt(Σ se_b²) / B`. All traces of a method must produce the same `t` grid.
/// Input order does not affect the result.
pub fn aggregate(traces: &[ObservationTrace], measure: Measure) -> Result<MeanSeries> {
    if traces.is_empty() {
        return invalid("no traces to aggregate");
    }
    let mut sorted: Vec<&ObservationTrace> = traces.iter().collect();
    sorted.sort_by_cached_key(|t| sort_key(t));
    let mut by_bench: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    let mut grid: Option<(usize, usize)> = None;
    for t in sorted {
        let (first_t, values) = measure.series(t)?;
        let g = (first_t, values.len());
        match grid {
            None => grid = Some(g),
            Some(prev) if prev != g => {
                return invalid(format!(
                    "trace {} {} seed {} has {} values from t = {}, expected {} from t = {}",
                    t.meta.benchmark,
                    t.meta.method(),
                    t.meta.seed,
                    g.1,
                    g.0,
                    prev.1,
                    prev.0
                ))
            }
            _ => {}
        }
        by_bench.entry(t.meta.benchmark.as_str()).or_default().push(values);
    }
    let (first_t, len) = grid.expect("at least one trace");
    let b = by_bench.len() as f64;
    let mut mean = vec![0.0; len];
    let mut var = vec![0.0; len];
    for rows in by_bench.values() {
        let (m, s) = mean_and_sem(rows);
        for j in 0..len {
            mean[j] += m[j];
            var[j] += s[j] * s[j];
        }
    }
    Ok(MeanSeries { first_t, mean: mean.iter().map(|v| v / b).collect(), sem: var.iter().map(|v| v.sqrt() / b).collect() })
}

/// Normalized OTSD aggregated per method, averaging over seeds first and benchmarks second.
pub fn aggregate_normalized_otsd(groups: &BTreeMap<String, Vec<ObservationTrace>>) -> Result<BTreeMap<String, MeanSeries>> {
    groups.iter().map(|(m, ts)| Ok((m.clone(), aggregate(ts, Measure::Metric(MetricKind::OtsdNorm))?))).collect()
}

/// Group traces by method label.
pub fn group_by_method(traces: Vec<ObservationTrace>) -> BTreeMap<String, Vec<ObservationTrace>> {
    let mut out: BTreeMap<String, Vec<ObservationTrace>> = BTreeMap::new();
    for t in traces {
        out.entry(t.meta.method()).or_default().push(t);
    }
    out
}

/// `scores[problem][method]`, one value per `t`.
pub type ProblemScores = BTreeMap<String, BTreeMap<String, Vec<f64>>>;

/// Seed-averaged per-problem series of a metric, keyed by problem then method.
pub fn problem_means(traces: &[ObservationTrace], measure: Measure) -> Result<(usize, ProblemScores)> {
    let mut cells: BTreeMap<String, BTreeMap<String, Vec<ObservationTrace>>> = BTreeMap::new();
    for t in traces {
        cells.entry(t.meta.benchmark.clone()).or_default().entry(t.meta.method()).or_default().push(t.clone());
    }
    let mut first: Option<usize> = None;
    let mut out = BTreeMap::new();
    for (problem, methods) in cells {
        let mut row = BTreeMap::new();
        for (method, ts) in methods {
            let s = aggregate(&ts, measure)?;
            if first.is_some_and(|f| f != s.first_t) {
                return invalid("metric series start at different t");
            }
            first = Some(s.first_t);
            row.insert(method, s.mean);
        }
        out.insert(problem, row);
    }
    Ok((first.unwrap_or(1), out))
}
