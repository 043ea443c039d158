use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::kernel::{self, matern52_lengthscale_factor, matern52_profile, KernelParams};
use super::dense;
use super::lbfgs::minimize_box;
use crate::error::{invalid, Error, Result};
use crate::rng;

pub const FIT_STARTS: usize = 8;
pub const FIT_MAX_ITER: usize = 100;
const BASE_JITTER: f64 = 1e-8;
const MAX_JITTER: f64 = 1e-2;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Zero-mean GP on standardized targets with a cached Cholesky factor.
///
/// `chol · cholᵀ = K + (σ_n² + jitter) I`, and `alpha` solves that system
/// against the standardized targets. Immutable once built.
#[derive(Debug, Clone)]
pub struct GpModel {
    params: KernelParams,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    target_mean: f64,
    target_std: f64,
    jitter: f64,
    chol: DMatrix<f64>,
    alpha: DVector<f64>,
}

fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let mut std = var.sqrt();
    if !(std > 1e-12 * mean.abs().max(1.0)) {
        std = 1.0;
    }
    (y.iter().map(|v| (v - mean) / std).collect(), mean, std)
}

fn check_data(inputs: &[Vec<f64>], targets: &[f64]) -> Result<usize> {
    if inputs.len() < 2 {
        return invalid(format!("GP needs at least 2 observations, got {}", inputs.len()));
    }
    if inputs.len() != targets.len() {
        return invalid(format!("{} inputs but {} targets", inputs.len(), targets.len()));
    }
    let d = inputs[0].len();
    if d == 0 || inputs.iter().any(|x| x.len() != d) {
        return invalid("inputs have inconsistent dimensions");
    }
    if inputs.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return invalid("non-finite training data");
    }
    Ok(d)
}

fn kernel_matrix(inputs: &[Vec<f64>], params: &KernelParams) -> DMatrix<f64> {
    let n = inputs.len();
    let mut k = DMatrix::zeros(n, n);
    for a in 0..n {
        k[(a, a)] = params.signal_variance;
        for b in 0..a {
            let v = kernel::eval(&inputs[a], &inputs[b], params);
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    k
}

/// Factor `K + (σ_n² + jitter) I`, escalating jitter ×10 from 1e-8 to 1e-2.
fn factor(k: &DMatrix<f64>, noise: f64) -> Option<(DMatrix<f64>, f64)> {
    let mut jitter = BASE_JITTER;
    while jitter <= MAX_JITTER * 1.000_001 {
        let mut a = k.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += noise + jitter;
        }
        if let Some(c) = a.cholesky() {
            return Some((c.unpack(), jitter));
        }
        jitter *= 10.0;
    }
    None
}

fn solve_lower(l: &DMatrix<f64>, b: &mut DVector<f64>) {
    let n = l.nrows();
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= l[(i, j)] * b[j];
        }
        b[i] = s / l[(i, i)];
    }
}

fn solve_upper_t(l: &DMatrix<f64>, b: &mut DVector<f64>) {
    let n = l.nrows();
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= l[(j, i)] * b[j];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Precomputed pairwise squared coordinate differences for likelihood evaluation.
struct LikelihoodData<'a> {
    n: usize,
    d: usize,
    /// `sq[p * d + j]` for pair `p` enumerating `(a, b)` with `b < a`.
    sq: Vec<f64>,
    y: &'a [f64],
}

impl<'a> LikelihoodData<'a> {
    fn new(inputs: &[Vec<f64>], y: &'a [f64]) -> Self {
        let n = inputs.len();
        let d = inputs[0].len();
        let mut sq = Vec::with_capacity(n * (n - 1) / 2 * d);
        for a in 0..n {
            for b in 0..a {
                sq.extend(inputs[a].iter().zip(&inputs[b]).map(|(u, v)| (u - v) * (u - v)));
            }
        }
        Self { n, d, sq, y }
    }

    /// Log marginal likelihood and its gradient in log-parameter space.
    fn eval(&self, theta: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (n, d) = (self.n, self.d);
        let inv_l2: Vec<f64> = theta[..d].iter().map(|t| (-2.0 * t).exp()).collect();
        let sigma2 = theta[d].exp();
        let noise = theta[d + 1].exp();

        // r and the profile per pair, reused by the gradient
        let npairs = n * (n - 1) / 2;
        let mut r = Vec::with_capacity(npairs);
        let mut a = vec![0.0; n * n];
        let mut p = 0;
        for i in 0..n {
            a[i * n + i] = sigma2 + noise + BASE_JITTER;
            for j in 0..i {
                let row = &self.sq[p * d..(p + 1) * d];
                let rr = row.iter().zip(&inv_l2).map(|(s, w)| s * w).sum::<f64>().sqrt();
                a[i * n + j] = sigma2 * matern52_profile(rr);
                r.push(rr);
                p += 1;
            }
        }
        if !dense::cholesky_in_place(&mut a, n) {
            return None;
        }
        let l = a;
        let mut alpha = self.y.to_vec();
        dense::cholesky_solve(&l, n, &mut alpha);
        let log_det_half: f64 = (0..n).map(|i| l[i * n + i].ln()).sum();
        let fit_term: f64 = self.y.iter().zip(&alpha).map(|(y, a)| y * a).sum();
        let lml = -0.5 * fit_term - log_det_half - 0.5 * n as f64 * LN_2PI;
        if !lml.is_finite() {
            return None;
        }
        let ainv = dense::inverse_from_cholesky(&l, n);

        // ∂lml/∂θ = ½ tr(W ∂A/∂θ), W = ααᵀ − A⁻¹; off-diagonal pairs count twice
        let mut grad = vec![0.0; d + 2];
        let mut p = 0;
        for i in 0..n {
            for j in 0..i {
                let w = alpha[i] * alpha[j] - ainv[i * n + j];
                let rr = r[p];
                grad[d] += w * sigma2 * matern52_profile(rr);
                let f = w * sigma2 * matern52_lengthscale_factor(rr);
                let row = &self.sq[p * d..(p + 1) * d];
                for k in 0..d {
                    grad[k] += f * row[k] * inv_l2[k];
                }
                p += 1;
            }
        }
        let mut trace_w = 0.0;
        for i in 0..n {
            let w = alpha[i] * alpha[i] - ainv[i * n + i];
            trace_w += w;
            grad[d] += 0.5 * w * sigma2;
        }
        grad[d + 1] = 0.5 * noise * trace_w;
        Some((lml, grad))
    }
}

impl GpModel {
    /// Build a model with fixed hyperparameters (no optimization).
    pub fn with_params(inputs: &[Vec<f64>], targets: &[f64], params: KernelParams) -> Result<Self> {
        let d = check_data(inputs, targets)?;
        if params.dim() != d {
            return invalid(format!("kernel has {} lengthscales for {d}-dimensional inputs", params.dim()));
        }
        let (ys, mean, std) = standardize(targets);
        Self::assemble(inputs.to_vec(), ys, mean, std, params)
    }

    pub(crate) fn assemble(inputs: Vec<Vec<f64>>, targets: Vec<f64>, mean: f64, std: f64, params: KernelParams) -> Result<Self> {
        let k = kernel_matrix(&inputs, &params);
        let (chol, jitter) = factor(&k, params.noise_variance)
            .ok_or_else(|| Error::ModelFit(format!("kernel matrix not positive definite with jitter up to {MAX_JITTER}")))?;
        let mut alpha = DVector::from_column_slice(&targets);
        solve_lower(&chol, &mut alpha);
        solve_upper_t(&chol, &mut alpha);
        Ok(Self { params, inputs, targets, target_mean: mean, target_std: std, jitter, chol, alpha })
    }

    /// Fit hyperparameters by maximizing the log marginal likelihood.
    ///
    /// Eight bounded L-BFGS ascents in log-parameter space: one from
    /// `ℓ = 0.5 √d`, seven from log-uniform random draws.
    pub fn fit(inputs: &[Vec<f64>], targets: &[f64], seed: u64) -> Result<Self> {
        let d = check_data(inputs, targets)?;
        let (ys, mean, std) = standardize(targets);
        let data = LikelihoodData::new(inputs, &ys);
        let (lo, hi) = KernelParams::log_bounds(d);
        let mut rng = rng::stream(seed, &[rng::label("gp-fit")]);

        let mut best: Option<(Vec<f64>, f64)> = None;
        for start in 0..FIT_STARTS {
            let theta0 = if start == 0 { Self::initial_guess(d).to_log() } else { random_start(d, &mut rng) };
            let objective = |th: &[f64]| data.eval(th).map(|(v, g)| (-v, g.into_iter().map(|x| -x).collect()));
            if let Some((theta, neg_lml)) = minimize_box(objective, &theta0, &lo, &hi, FIT_MAX_ITER) {
                if best.as_ref().is_none_or(|(_, b)| neg_lml < *b) {
                    best = Some((theta, neg_lml));
                }
            }
        }
        let (theta, _) = best.ok_or_else(|| Error::ModelFit("likelihood undefined at every start".into()))?;
        Self::assemble(inputs.to_vec(), ys, mean, std, KernelParams::from_log(&theta))
    }

    /// Starting hyperparameters: `ℓ = 0.5 √d`, unit signal variance, noise 1e-3.
    pub fn initial_guess(d: usize) -> KernelParams {
        KernelParams { lengthscales: vec![0.5 * (d as f64).sqrt(); d], signal_variance: 1.0, noise_variance: 1e-3 }
    }

    /// Log marginal likelihood of the standardized targets under `params`.
    pub fn log_marginal_likelihood_at(inputs: &[Vec<f64>], targets: &[f64], params: &KernelParams) -> Result<f64> {
        check_data(inputs, targets)?;
        let (ys, _, _) = standardize(targets);
        let data = LikelihoodData::new(inputs, &ys);
        data.eval(&params.to_log())
            .map(|(v, _)| v)
            .ok_or_else(|| Error::ModelFit("kernel matrix not positive definite".into()))
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.n();
        let y = DVector::from_column_slice(&self.targets);
        let log_det_half: f64 = (0..n).map(|i| self.chol[(i, i)].ln()).sum();
        -0.5 * y.dot(&self.alpha) - log_det_half - 0.5 * n as f64 * LN_2PI
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn standardized_targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn target_std(&self) -> f64 {
        self.target_std
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    /// Noise plus jitter on the diagonal of the factored matrix.
    pub fn diagonal_noise(&self) -> f64 {
        self.params.noise_variance + self.jitter
    }

    /// Largest observed target in original units.
    pub fn incumbent(&self) -> f64 {
        self.targets.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) * self.target_std + self.target_mean
    }

    /// Training input with the largest observed target (first on ties).
    pub fn incumbent_point(&self) -> &[f64] {
        let mut best = 0;
        for (i, &y) in self.targets.iter().enumerate() {
            if y > self.targets[best] {
                best = i;
            }
        }
        &self.inputs[best]
    }

    /// Largest standardized target.
    pub(crate) fn standardized_incumbent(&self) -> f64 {
        self.targets.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub(crate) fn kvec(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.inputs.iter().map(|xi| kernel::eval(xi, x, &self.params)))
    }

    /// `L⁻¹ v`.
    pub(crate) fn whiten(&self, mut v: DVector<f64>) -> DVector<f64> {
        solve_lower(&self.chol, &mut v);
        v
    }

    /// `(K + σ_n² I)⁻¹ v`.
    pub(crate) fn solve(&self, mut v: DVector<f64>) -> DVector<f64> {
        solve_lower(&self.chol, &mut v);
        solve_upper_t(&self.chol, &mut v);
        v
    }

    /// Standardized posterior mean and unclamped variance.
    pub(crate) fn predict_standardized_raw(&self, x: &[f64]) -> (f64, f64) {
        let k = self.kvec(x);
        let mu = k.dot(&self.alpha);
        let v = self.whiten(k);
        (mu, self.params.signal_variance - v.dot(&v))
    }

    /// Standardized posterior mean and variance (clamped at 0).
    pub fn predict_standardized(&self, x: &[f64]) -> (f64, f64) {
        let (m, v) = self.predict_standardized_raw(x);
        (m, v.max(0.0))
    }

    /// Posterior mean and latent variance at `x` in original target units.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.dim() {
            return invalid(format!("query has {} coordinates, model has {}", x.len(), self.dim()));
        }
        let (m, v) = self.predict_standardized(x);
        Ok((self.target_mean + self.target_std * m, self.target_std * self.target_std * v))
    }

    /// Condition on one extra observation without refitting hyperparameters.
    ///
    /// Extends the Cholesky factor by one row; the standardization constants
    /// are kept, so `y` is interpreted in original units.
    pub fn condition_on(&self, x: &[f64], y: f64) -> Result<Self> {
        if x.len() != self.dim() {
            return invalid(format!("point has {} coordinates, model has {}", x.len(), self.dim()));
        }
        let n = self.n();
        let k = self.kvec(x);
        let l_row = self.whiten(k);
        let diag2 = self.params.signal_variance + self.diagonal_noise() - l_row.dot(&l_row);
        if !(diag2 > 0.0) {
            return Err(Error::ModelFit("conditioning point makes the kernel matrix singular".into()));
        }
        let mut chol = self.chol.clone().resize(n + 1, n + 1, 0.0);
        for j in 0..n {
            chol[(n, j)] = l_row[j];
        }
        chol[(n, n)] = diag2.sqrt();
        let mut inputs = self.inputs.clone();
        inputs.push(x.to_vec());
        let mut targets = self.targets.clone();
        targets.push((y - self.target_mean) / self.target_std);
        let mut alpha = DVector::from_column_slice(&targets);
        solve_lower(&chol, &mut alpha);
        solve_upper_t(&chol, &mut alpha);
        Ok(Self { params: self.params.clone(), inputs, targets, target_mean: self.target_mean, target_std: self.target_std, jitter: self.jitter, chol, alpha })
    }
}

fn random_start<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut log_uniform = |lo: f64, hi: f64| rng.gen_range(lo.ln()..hi.ln());
    let mut v: Vec<f64> = (0..d).map(|_| log_uniform(0.05, 5.0)).collect();
    v.push(log_uniform(0.2, 5.0));
    v.push(log_uniform(1e-6, 1e-1));
    v
}
