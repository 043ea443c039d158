//! Approximate posterior function draws: random Fourier features plus a pathwise update.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::gp::GpModel;
use super::kernel;
use crate::rng;

pub const RFF_FEATURES: usize = 500;

/// One posterior function draw; deterministic once constructed.
#[derive(Debug, Clone)]
pub struct PosteriorSample {
    /// Row-major `M × d` frequencies.
    freqs: Vec<f64>,
    phases: Vec<f64>,
    weights: Vec<f64>,
    feature_scale: f64,
    dim: usize,
    model: GpModel,
    /// `(K + σ_n² I)⁻¹ (y − f_prior(X) − ε)` in standardized units.
    update: DVector<f64>,
}

impl PosteriorSample {
    fn prior(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, (b, w)) in self.phases.iter().zip(&self.weights).enumerate() {
            let row = &self.freqs[m * self.dim..(m + 1) * self.dim];
            let arg: f64 = row.iter().zip(x).map(|(o, v)| o * v).sum::<f64>() + b;
            acc += w * arg.cos();
        }
        self.feature_scale * acc
    }

    /// Sampled function value at `x` in original target units.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let p = self.model.params();
        let correction: f64 = self.model.inputs().iter().zip(self.update.iter()).map(|(xi, u)| kernel::eval(xi, x, p) * u).sum();
        let f = self.prior(x) + correction;
        self.model.target_mean() + self.model.target_std() * f
    }
}

/// Draw a posterior function from `model`, reproducible for a given `seed`.
///
/// Frequencies follow the Matérn-5/2 spectral density, a multivariate
/// Student-t with 5 degrees of freedom scaled by the inverse lengthscales.
pub fn sample_posterior_function(model: &GpModel, seed: u64) -> PosteriorSample {
    let mut rng = rng::stream(seed, &[rng::label("posterior-sample")]);
    let p = model.params();
    let d = model.dim();
    let chi = ChiSquared::new(5.0).expect("positive degrees of freedom");
    let mut freqs = Vec::with_capacity(RFF_FEATURES * d);
    for _ in 0..RFF_FEATURES {
        let g: f64 = chi.sample(&mut rng);
        let scale = (5.0 / g).sqrt();
        for l in &p.lengthscales {
            let z: f64 = StandardNormal.sample(&mut rng);
            freqs.push(z * scale / l);
        }
    }
    let phases: Vec<f64> = (0..RFF_FEATURES).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let weights: Vec<f64> = (0..RFF_FEATURES).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut sample = PosteriorSample {
        freqs,
        phases,
        weights,
        feature_scale: (2.0 * p.signal_variance / RFF_FEATURES as f64).sqrt(),
        dim: d,
        model: model.clone(),
        update: DVector::zeros(model.n()),
    };
    let noise_sd = model.diagonal_noise().sqrt();
    let residual = DVector::from_iterator(
        model.n(),
        model.inputs().iter().zip(model.standardized_targets()).map(|(xi, &y)| {
            let eps: f64 = StandardNormal.sample(&mut rng);
            y - sample.prior(xi) - noise_sd * eps
        }),
    );
    sample.update = model.solve(residual);
    sample
}
