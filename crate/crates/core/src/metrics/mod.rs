//! Exploration measures of an observation trace.
//!
//! * OTSD: length of a cheapest-insertion closed tour through the first `t`
//!   observations. The heuristic is within a factor two of the optimal tour.
//! * Normalized OTSD: OTSD divided by [`psi_bound`], the worst-case optimal
//!   tour length of `t` points in the unit `d`-cube.
//! * OE: Kozachenko–Leonenko entropy of the first `t` observations with
//!   neighbour order `max(1, round(ln t))`.
//!
//! Each measure is returned as a [`MetricSeries`] indexed by observation count.

mod entropy;
mod tour;

use std::fmt::Write as _;

pub use entropy::{neighbor_order, oe, prefix_entropies, DISTANCE_FLOOR};
pub use tour::{closed_tour_length, exact_tsp, prefix_tour_lengths, TourState, EXACT_TSP_MAX_POINTS};

use crate::error::{invalid, Error, Result};
use crate::trace::ObservationTrace;

/// Largest dimension for which entropy estimates are produced.
pub const MAX_ENTROPY_DIM: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Otsd,
    OtsdNorm,
    Oe,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Otsd => "otsd",
            MetricKind::OtsdNorm => "otsd-norm",
            MetricKind::Oe => "oe",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "otsd" => Ok(MetricKind::Otsd),
            "otsd-norm" => Ok(MetricKind::OtsdNorm),
            "oe" => Ok(MetricKind::Oe),
            other => invalid(format!("unknown metric kind {other:?}")),
        }
    }
}

/// Per-iteration values of one measure; `values[i]` belongs to `t = first_t + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub kind: MetricKind,
    pub first_t: usize,
    pub values: Vec<f64>,
    pub dim: usize,
}

impl MetricSeries {
    /// Value after `t` observations, if the series covers `t`.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.first_t).and_then(|i| self.values.get(i).copied())
    }

    pub fn last_t(&self) -> usize {
        self.first_t + self.values.len() - 1
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("metric series are never empty")
    }

    /// `(t, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.first_t + i, v))
    }

    /// CSV with header `t,value`, one row per iteration, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.iter() {
            writeln!(out, "{t},{v}").unwrap();
        }
        out
    }
}

/// Upper bound `2 √(5d) (3t/2)^(1 − 1/d)` on the optimal closed tour through `t` points of `[0,1]^d`.
pub fn psi_bound(d: usize, t: usize) -> Result<f64> {
    if d < 2 {
        return invalid(format!("tour bound needs d >= 2, got {d}"));
    }
    if t < 1 {
        return invalid("tour bound needs t >= 1");
    }
    let d = d as f64;
    Ok(2.0 * (5.0 * d).sqrt() * (1.5 * t as f64).powf(1.0 - 1.0 / d))
}

/// Cheapest-insertion tour length for every prefix, `t = 1..=T`.
pub fn otsd_series(trace: &ObservationTrace) -> Result<MetricSeries> {
    if trace.is_empty() {
        return invalid("empty trace");
    }
    Ok(MetricSeries {
        kind: MetricKind::Otsd,
        first_t: 1,
        values: prefix_tour_lengths(trace.points())?,
        dim: trace.dim(),
    })
}

/// OTSD divided by [`psi_bound`] for every prefix.
pub fn otsd_normalized(trace: &ObservationTrace) -> Result<MetricSeries> {
    if trace.dim() < 2 {
        return Err(Error::Unsupported(format!("normalized OTSD needs d >= 2, trace has d = {}", trace.dim())));
    }
    let mut series = otsd_series(trace)?;
    for (i, v) in series.values.iter_mut().enumerate() {
        *v /= psi_bound(trace.dim(), i + 1)?;
    }
    series.kind = MetricKind::OtsdNorm;
    Ok(series)
}

/// Observation entropy for every prefix from `t = 3` on; refused above [`MAX_ENTROPY_DIM`].
pub fn oe_series(trace: &ObservationTrace) -> Result<MetricSeries> {
    if trace.dim() > MAX_ENTROPY_DIM {
        return Err(Error::Unsupported(format!("entropy estimates are limited to d <= {MAX_ENTROPY_DIM}, trace has d = {}", trace.dim())));
    }
    if trace.len() < 3 {
        return invalid(format!("entropy series needs at least 3 observations, got {}", trace.len()));
    }
    Ok(MetricSeries {
        kind: MetricKind::Oe,
        first_t: 3,
        values: prefix_entropies(trace.points())?,
        dim: trace.dim(),
    })
}

/// Compute the series of `kind` for `trace`.
pub fn series(trace: &ObservationTrace, kind: MetricKind) -> Result<MetricSeries> {
    match kind {
        MetricKind::Otsd => otsd_series(trace),
        MetricKind::OtsdNorm => otsd_normalized(trace),
        MetricKind::Oe => oe_series(trace),
    }
}
