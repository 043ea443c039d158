use rand::Rng;

use crate::error::{invalid, Result};
use crate::metrics::{self, MetricKind, MetricSeries};
use crate::rng;
use crate::trace::{ObservationTrace, TraceMeta};

/// Normalized OTSD at or above this value is reported but tolerated.
pub const BOUND_NOTICE: f64 = 1.0;
/// Normalized OTSD at or above this value contradicts the heuristic guarantee.
pub const BOUND_VIOLATION: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub label: String,
    pub dim: usize,
    pub len: usize,
    pub max_normalized: f64,
    pub terminal: f64,
}

impl BoundRow {
    pub fn from_series(label: impl Into<String>, series: &MetricSeries) -> Self {
        let max_normalized = series.values.iter().cloned().fold(0.0, f64::max);
        Self { label: label.into(), dim: series.dim, len: series.last_t(), max_normalized, terminal: series.terminal() }
    }

    pub fn notice(&self) -> bool {
        self.max_normalized >= BOUND_NOTICE
    }

    pub fn violation(&self) -> bool {
        self.max_normalized >= BOUND_VIOLATION
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(BoundRow::violation)
    }

    pub fn notices(&self) -> usize {
        self.rows.iter().filter(|r| r.notice()).count()
    }

    /// Per-dimension summary: `(d, rows, largest maximum, smallest terminal, largest terminal)`.
    pub fn by_dim(&self) -> Vec<(usize, usize, f64, f64, f64)> {
        let mut dims: Vec<usize> = self.rows.iter().map(|r| r.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        dims.into_iter()
            .map(|d| {
                let rows: Vec<&BoundRow> = self.rows.iter().filter(|r| r.dim == d).collect();
                let max = rows.iter().map(|r| r.max_normalized).fold(0.0, f64::max);
                let lo = rows.iter().map(|r| r.terminal).fold(f64::INFINITY, f64::min);
                let hi = rows.iter().map(|r| r.terminal).fold(f64::NEG_INFINITY, f64::max);
                (d, rows.len(), max, lo, hi)
            })
            .collect()
    }

    /// Plain-text table, one line per dimension.
    pub fn table(&self) -> String {
        let mut out = String::from("d\truns\tmax_norm_otsd\tterminal_min\tterminal_max\n");
        for (d, n, max, lo, hi) in self.by_dim() {
            out.push_str(&format!("{d}\t{n}\t{max:.6}\t{lo:.6}\t{hi:.6}\n"));
        }
        out
    }
}

/// Largest normalized OTSD of each trace; traces must have `d ≥ 3`.
pub fn verify_otsd_bound(traces: &[ObservationTrace]) -> Result<BoundReport> {
    let mut rows = Vec::with_capacity(traces.len());
    for t in traces {
        if t.dim() < 3 {
            return invalid(format!("bound check needs d >= 3, trace {} has d = {}", t.meta.method(), t.dim()));
        }
        let s = metrics::otsd_normalized(t)?;
        let label = format!("{} {} seed {}", t.meta.benchmark, t.meta.method(), t.meta.seed);
        rows.push(BoundRow::from_series(label, &s));
    }
    Ok(BoundReport { rows })
}

/// Like [`verify_otsd_bound`] for raw point sets, which need not lie in the unit cube.
pub fn verify_point_sets(sets: &[(String, Vec<Vec<f64>>)]) -> Result<BoundReport> {
    let mut rows = Vec::with_capacity(sets.len());
    for (label, points) in sets {
        let d = points.first().map_or(0, Vec::len);
        if d < 3 {
            return invalid(format!("bound check needs d >= 3, {label} has d = {d}"));
        }
        if points.iter().any(|p| p.len() != d) {
            return invalid(format!("{label} mixes point dimensions"));
        }
        let mut values = metrics::prefix_tour_lengths(points)?;
        for (i, v) in values.iter_mut().enumerate() {
            *v /= metrics::psi_bound(d, i + 1)?;
        }
        let series = MetricSeries { kind: MetricKind::OtsdNorm, first_t: 1, values, dim: d };
        rows.push(BoundRow::from_series(label.clone(), &series));
    }
    Ok(BoundReport { rows })
}

/// `reps` traces of `t` uniform points in `[0,1]^d`, reproducible from `seed`.
pub fn uniform_traces(d: usize, t: usize, reps: usize, seed: u64) -> Result<Vec<ObservationTrace>> {
    (0..reps)
        .map(|rep| {
            let mut r = rng::stream(seed, &[rng::label("uniform-trace"), d as u64, rep as u64]);
            let points: Vec<Vec<f64>> = (0..t).map(|_| (0..d).map(|_| r.gen::<f64>()).collect()).collect();
            let meta = TraceMeta { benchmark: format!("uniform{d}"), af: "rs".into(), variant: "plain".into(), seed: rep as u64, doe: 0 };
            ObservationTrace::from_parts(points, vec![0.0; t], meta)
        })
        .collect()
}
