//! Synthetic test functions on the unit cube, negated so that larger is better.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Branin,
    Levy,
    Hartmann6,
    Griewank,
}

/// A test function with native box bounds; evaluation takes unit-cube coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    name: &'static str,
    kind: Kind,
    lower: Vec<f64>,
    upper: Vec<f64>,
    known_optimum: Option<f64>,
    noise_std: f64,
}

pub const BENCHMARK_NAMES: [&str; 4] = ["branin2", "levy4", "hartmann6", "griewank8"];

impl Benchmark {
    pub fn by_name(name: &str) -> Result<Self> {
        let (name, kind, lower, upper, opt) = match name {
            "branin2" => ("branin2", Kind::Branin, vec![-5.0, 0.0], vec![10.0, 15.0], -0.397_887_357_729_738),
            "levy4" => ("levy4", Kind::Levy, vec![-10.0; 4], vec![10.0; 4], 0.0),
            "hartmann6" => ("hartmann6", Kind::Hartmann6, vec![0.0; 6], vec![1.0; 6], 3.322_368_011_415_515),
            "griewank8" => ("griewank8", Kind::Griewank, vec![-600.0; 8], vec![600.0; 8], 0.0),
            other => return invalid(format!("unknown benchmark {other:?}")),
        };
        Ok(Self { name, kind, lower, upper, known_optimum: Some(opt), noise_std: 0.0 })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn native_bounds(&self) -> (&[f64], &[f64]) {
        (&self.lower, &self.upper)
    }

    /// Global maximum under the maximization convention.
    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn to_native(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.lower).zip(&self.upper).map(|((&v, &l), &h)| l + v * (h - l)).collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.lower).zip(&self.upper).map(|((&v, &l), &h)| (v - l) / (h - l)).collect()
    }

    /// Objective at unit-cube point `u` (maximization convention).
    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim() {
            return invalid(format!("{} expects {} coordinates, got {}", self.name, self.dim(), u.len()));
        }
        if let Some(v) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return invalid(format!("coordinate {v} outside the unit cube"));
        }
        Ok(-self.evaluate_native_min(&self.to_native(u)))
    }

    /// Standard (minimization) form at native coordinates.
    pub fn evaluate_native_min(&self, x: &[f64]) -> f64 {
        match self.kind {
            Kind::Branin => branin(x),
            Kind::Levy => levy(x),
            Kind::Hartmann6 => hartmann6(x),
            Kind::Griewank => griewank(x),
        }
    }

    /// Simple regret of a best observed value, when the optimum is known.
    pub fn simple_regret(&self, best: f64) -> Option<f64> {
        self.known_optimum.map(|opt| opt - best)
    }

    /// `n` uniform points in the unit cube with their objective values.
    pub fn doe(&self, n: usize, seed: u64) -> Vec<(Vec<f64>, f64)> {
        let mut rng = rng::stream(seed, &[rng::label("doe"), rng::label(self.name)]);
        (0..n)
            .map(|_| {
                let u: Vec<f64> = (0..self.dim()).map(|_| rng.gen::<f64>()).collect();
                let y = self.evaluate(&u).expect("uniform draws lie in the unit cube");
                (u, y)
            })
            .collect()
    }
}

fn branin(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

fn levy(x: &[f64]) -> f64 {
    let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let d = w.len();
    let head = (PI * w[0]).sin().powi(2);
    let mid: f64 = w[..d - 1]
        .iter()
        .map(|&wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let last = w[d - 1];
    let tail = (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2));
    head + mid + tail
}

const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartmann6(x: &[f64]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..6).map(|j| HARTMANN_A[i][j] * (x[j] - HARTMANN_P[i][j]).powi(2)).sum();
            HARTMANN_ALPHA[i] * (-inner).exp()
        })
        .sum::<f64>()
}

fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v / 4000.0).sum();
    let prod: f64 = x.iter().enumerate().map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos()).product();
    1.0 + sum - prod
}
