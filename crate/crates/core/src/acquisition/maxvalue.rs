//! Gumbel approximation to the distribution of the objective maximum.

use rand::Rng;

use crate::rng;
use crate::special::ln_norm_cdf;
use crate::surrogate::GpModel;

pub const MAX_VALUE_GRID: usize = 1000;

/// `ln P(max ≤ v)` under independent Gaussian marginals.
fn ln_max_cdf(v: f64, mu: &[f64], sigma: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&m, &s) in mu.iter().zip(sigma) {
        if s < 1e-12 {
            if v < m {
                return f64::NEG_INFINITY;
            }
        } else {
            acc += ln_norm_cdf((v - m) / s);
        }
    }
    acc
}

fn quantile(p: f64, mu: &[f64], sigma: &[f64]) -> f64 {
    let target = p.ln();
    let top = mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = sigma.iter().cloned().fold(0.0, f64::max);
    let mut lo = top - 10.0 * spread;
    let mut hi = mu.iter().zip(sigma).map(|(m, s)| m + 10.0 * s).fold(top, f64::max);
    if !(hi > lo) {
        return top;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_max_cdf(mid, mu, sigma) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Draw maxima from a Gumbel fitted to the quartiles of `Π Φ((v − μ_i)/σ_i)`,
/// clamped below at `floor`.
pub(crate) fn gumbel_max_samples<R: Rng + ?Sized>(mu: &[f64], sigma: &[f64], n: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let q1 = quantile(0.25, mu, sigma);
    let q2 = quantile(0.5, mu, sigma);
    let q3 = quantile(0.75, mu, sigma);
    let (l1, l3) = ((-(0.25f64).ln()).ln(), (-(0.75f64).ln()).ln());
    let scale = ((q3 - q1) / (l1 - l3)).max(0.0);
    let loc = q2 + scale * (-(0.5f64).ln()).ln();
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            (loc - scale * (-u.ln()).ln()).max(floor)
        })
        .collect()
}

/// Standardized-unit maxima used internally by max-value entropy search.
pub(crate) fn standardized_max_samples(model: &GpModel, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, &[rng::label("max-value-grid")]);
    let grid = rng::halton(MAX_VALUE_GRID, model.dim(), &mut r);
    let (mu, sigma): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .map(|x| {
            let (m, v) = model.predict_standardized(x);
            (m, v.sqrt())
        })
        .unzip();
    gumbel_max_samples(&mu, &sigma, n, model.standardized_incumbent(), &mut r)
}

/// Sample plausible values of the objective maximum from the posterior.
///
/// Every sample is at least the incumbent.
pub fn sample_max_values(model: &GpModel, n_samples: usize, seed: u64) -> Vec<f64> {
    standardized_max_samples(model, n_samples, seed)
        .into_iter()
        .map(|s| model.target_mean() + model.target_std() * s)
        .collect()
}
