//! One-step knowledge gradient with rank-one fantasy updates.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::spec::KG_MAX_DIM;
use crate::error::{Error, Result};
use crate::rng;
use crate::surrogate::{kernel, GpModel};

pub const KG_FANTASIES: usize = 8;
pub const KG_INNER_GRID: usize = 512;

/// Precomputed inner-grid quantities for repeated KG evaluation in standardized units.
pub(crate) struct KgEvaluator<'a> {
    model: &'a GpModel,
    grid: Vec<Vec<f64>>,
    grid_mu: Vec<f64>,
    /// Column g holds `L⁻¹ k(X, grid_g)`.
    grid_w: DMatrix<f64>,
    normals: Vec<f64>,
    base_max: f64,
}

impl<'a> KgEvaluator<'a> {
    pub(crate) fn new(model: &'a GpModel, grid: Vec<Vec<f64>>, normals: Vec<f64>) -> Self {
        let n = model.n();
        let mut grid_w = DMatrix::zeros(n, grid.len());
        let mut grid_mu = Vec::with_capacity(grid.len());
        for (g, x) in grid.iter().enumerate() {
            let (m, _) = model.predict_standardized(x);
            grid_mu.push(m);
            grid_w.set_column(g, &model.whiten(model.kvec(x)));
        }
        let base_max = grid_mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self { model, grid, grid_mu, grid_w, normals, base_max }
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        let p = self.model.params();
        let v = self.model.whiten(self.model.kvec(x));
        let var = (p.signal_variance - v.dot(&v)).max(0.0);
        let sd = (var + self.model.diagonal_noise()).sqrt();
        let cross: DVector<f64> = self.grid_w.tr_mul(&v);
        let slope: Vec<f64> = self.grid.iter().zip(cross.iter()).map(|(g, c)| (kernel(g, x, p).unwrap_or(0.0) - c) / sd).collect();
        let total: f64 = self
            .normals
            .iter()
            .map(|z| self.grid_mu.iter().zip(&slope).map(|(m, s)| m + s * z).fold(f64::NEG_INFINITY, f64::max))
            .sum();
        total / self.normals.len() as f64 - self.base_max
    }
}

pub(crate) fn fantasy_normals(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, &[rng::label("kg-fantasies")]);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

/// Knowledge gradient of querying `x`, in original target units.
///
/// Fantasy outcomes `y ~ N(μ(x), σ²(x) + σ_n²)` use common random numbers
/// drawn from `seed`, so the value is deterministic.
pub fn kg(model: &GpModel, x: &[f64], n_fantasies: usize, inner_grid: &[Vec<f64>], seed: u64) -> Result<f64> {
    let d = model.dim();
    if d > KG_MAX_DIM {
        return Err(Error::InvalidConfig(format!("knowledge gradient is limited to d <= {KG_MAX_DIM}, got d = {d}")));
    }
    if n_fantasies < 2 {
        return Err(Error::InvalidConfig("knowledge gradient needs at least two fantasies".into()));
    }
    if x.len() != d || inner_grid.is_empty() || inner_grid.iter().any(|g| g.len() != d) {
        return Err(Error::InvalidInput("knowledge gradient query or grid has the wrong dimension".into()));
    }
    let ev = KgEvaluator::new(model, inner_grid.to_vec(), fantasy_normals(n_fantasies, seed));
    Ok(model.target_std() * ev.value(x))
}
