use crate::error::{invalid, Result};

pub const LENGTHSCALE_BOUNDS: (f64, f64) = (1e-3, 1e3);
pub const SIGNAL_VARIANCE_BOUNDS: (f64, f64) = (1e-3, 1e3);
pub const NOISE_VARIANCE_BOUNDS: (f64, f64) = (1e-6, 10.0);

const SQRT5: f64 = 2.236_067_977_499_79;

/// Matérn-5/2 ARD hyperparameters in unit-cube coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl KernelParams {
    pub fn new(lengthscales: Vec<f64>, signal_variance: f64, noise_variance: f64) -> Result<Self> {
        let (lo, hi) = LENGTHSCALE_BOUNDS;
        if lengthscales.is_empty() || lengthscales.iter().any(|l| !(lo..=hi).contains(l)) {
            return invalid(format!("lengthscales must lie in [{lo}, {hi}]"));
        }
        let (lo, hi) = SIGNAL_VARIANCE_BOUNDS;
        if !(lo..=hi).contains(&signal_variance) {
            return invalid(format!("signal variance {signal_variance} outside [{lo}, {hi}]"));
        }
        let (lo, hi) = NOISE_VARIANCE_BOUNDS;
        if !(lo..=hi).contains(&noise_variance) {
            return invalid(format!("noise variance {noise_variance} outside [{lo}, {hi}]"));
        }
        Ok(Self { lengthscales, signal_variance, noise_variance })
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// Log-space vector `[ln ℓ_1..ln ℓ_d, ln σ², ln σ_n²]`.
    pub(crate) fn to_log(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.lengthscales.iter().map(|l| l.ln()).collect();
        v.push(self.signal_variance.ln());
        v.push(self.noise_variance.ln());
        v
    }

    pub(crate) fn from_log(v: &[f64]) -> Self {
        let d = v.len() - 2;
        Self {
            lengthscales: v[..d].iter().map(|x| x.exp()).collect(),
            signal_variance: v[d].exp(),
            noise_variance: v[d + 1].exp(),
        }
    }

    pub(crate) fn log_bounds(d: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![LENGTHSCALE_BOUNDS.0.ln(); d];
        let mut hi = vec![LENGTHSCALE_BOUNDS.1.ln(); d];
        lo.push(SIGNAL_VARIANCE_BOUNDS.0.ln());
        hi.push(SIGNAL_VARIANCE_BOUNDS.1.ln());
        lo.push(NOISE_VARIANCE_BOUNDS.0.ln());
        hi.push(NOISE_VARIANCE_BOUNDS.1.ln());
        (lo, hi)
    }
}

/// Scaled distance `r = sqrt(Σ ((x_j − x'_j)/ℓ_j)²)`.
#[inline]
pub(crate) fn scaled_dist(x: &[f64], y: &[f64], ls: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(ls)
        .map(|((a, b), l)| {
            let z = (a - b) / l;
            z * z
        })
        .sum::<f64>()
        .sqrt()
}

/// Matérn-5/2 profile `(1 + √5 r + 5r²/3) e^{−√5 r}`.
#[inline]
pub(crate) fn matern52_profile(r: f64) -> f64 {
    let s = SQRT5 * r;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// `∂k/∂ln ℓ_j = σ² (5/3)(1 + √5 r) e^{−√5 r} (Δ_j/ℓ_j)²`; this returns the factor before `(Δ_j/ℓ_j)²`.
#[inline]
pub(crate) fn matern52_lengthscale_factor(r: f64) -> f64 {
    let s = SQRT5 * r;
    5.0 / 3.0 * (1.0 + s) * (-s).exp()
}

#[inline]
pub(crate) fn eval(x: &[f64], y: &[f64], p: &KernelParams) -> f64 {
    p.signal_variance * matern52_profile(scaled_dist(x, y, &p.lengthscales))
}

/// Matérn-5/2 ARD covariance between `x` and `y`.
pub fn kernel(x: &[f64], y: &[f64], params: &KernelParams) -> Result<f64> {
    if x.len() != params.dim() || y.len() != params.dim() {
        return invalid(format!(
            "kernel expects {}-dimensional inputs, got {} and {}",
            params.dim(),
            x.len(),
            y.len()
        ));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return invalid("non-finite kernel input");
    }
    Ok(eval(x, y, params))
}
