//! Closed-form acquisition values from a Gaussian predictive marginal.

use crate::error::{invalid, Result};
use crate::special::{ln_norm_cdf, norm_cdf, norm_pdf};

/// Expected improvement over `incumbent`.
pub fn ei(mu: f64, sigma2: f64, incumbent: f64) -> f64 {
    let sigma = sigma2.max(0.0).sqrt();
    let diff = mu - incumbent;
    if sigma == 0.0 {
        return diff.max(0.0);
    }
    let z = diff / sigma;
    (diff * norm_cdf(z) + sigma * norm_pdf(z)).max(0.0)
}

/// Probability of improving on `incumbent`.
pub fn pi(mu: f64, sigma2: f64, incumbent: f64) -> f64 {
    let sigma = sigma2.max(0.0).sqrt();
    if sigma == 0.0 {
        return if mu > incumbent { 1.0 } else { 0.0 };
    }
    norm_cdf((mu - incumbent) / sigma)
}

/// Upper confidence bound `μ + √β σ`.
pub fn ucb(mu: f64, sigma2: f64, beta: f64) -> f64 {
    mu + beta.sqrt() * sigma2.max(0.0).sqrt()
}

/// Information gain about one maximum value `y*` at standardized gap `γ = (y* − μ)/σ`.
pub(crate) fn mes_term(gamma: f64) -> f64 {
    let ln_cdf = ln_norm_cdf(gamma);
    let ratio = (-0.5 * gamma * gamma - 0.918_938_533_204_672_7 - ln_cdf).exp();
    (0.5 * gamma * ratio - ln_cdf).max(0.0)
}

/// Max-value entropy search, averaged over sampled maxima.
pub fn mes(mu: f64, sigma2: f64, max_value_samples: &[f64]) -> Result<f64> {
    if max_value_samples.is_empty() {
        return invalid("max-value entropy search needs at least one sampled maximum");
    }
    let sigma = sigma2.max(0.0).sqrt();
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let total: f64 = max_value_samples.iter().map(|&y| mes_term((y - mu) / sigma)).sum();
    Ok(total / max_value_samples.len() as f64)
}
