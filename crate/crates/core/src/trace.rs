use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Run metadata carried alongside the observations of one optimizer run.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TraceMeta {
    pub benchmark: String,
    /// Optimizer label, e.g. `ei`, `ucb0.1`, `rs`.
    pub af: String,
    /// Variant label, e.g. `plain`, `tr`, `raasp`, `q8`.
    pub variant: String,
    pub seed: u64,
    /// Number of leading design-of-experiments points.
    pub doe: usize,
}

impl TraceMeta {
    /// Method label used to group traces: `af` alone for plain runs, `af+variant` otherwise.
    pub fn method(&self) -> String {
        if self.variant.is_empty() || self.variant == "plain" {
            self.af.clone()
        } else {
            format!("{}+{}", self.af, self.variant)
        }
    }
}

/// Ordered observations of one optimizer run in unit-cube coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTrace {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    dim: usize,
    pub meta: TraceMeta,
}

impl ObservationTrace {
    /// Empty trace of dimension `dim`.
    pub fn new(dim: usize, meta: TraceMeta) -> Result<Self> {
        if dim == 0 {
            return invalid("trace dimension must be positive");
        }
        Ok(Self { points: Vec::new(), values: Vec::new(), dim, meta })
    }

    pub fn from_parts(points: Vec<Vec<f64>>, values: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.len(),
            None => return invalid("cannot infer dimension from an empty point list"),
        };
        if points.len() != values.len() {
            return invalid(format!("{} points but {} values", points.len(), values.len()));
        }
        let mut trace = Self::new(dim, meta)?;
        for (p, y) in points.into_iter().zip(values) {
            trace.push(p, y)?;
        }
        Ok(trace)
    }

    /// Append one observation; the point must have the trace dimension and lie in `[0,1]^d`.
    pub fn push(&mut self, point: Vec<f64>, value: f64) -> Result<()> {
        if point.len() != self.dim {
            return invalid(format!("point has {} coordinates, trace dimension is {}", point.len(), self.dim));
        }
        if let Some(v) = point.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return invalid(format!("coordinate {v} outside the unit cube"));
        }
        if value.is_nan() {
            return invalid("objective value is NaN");
        }
        self.points.push(point);
        self.values.push(value);
        Ok(())
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Running maximum of the objective values.
    pub fn running_best(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(f64::NEG_INFINITY, |best, &y| {
                *best = best.max(y);
                Some(*best)
            })
            .collect()
    }
}
