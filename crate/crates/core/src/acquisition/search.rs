//! Multi-start acquisition maximization, RAASP candidates and kriging-believer batches.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::functions::{ei, mes_term, pi, ucb};
use super::kg::{fantasy_normals, KgEvaluator, KG_FANTASIES, KG_INNER_GRID};
use super::maxvalue::standardized_max_samples;
use super::spec::{AcquisitionSpec, AfKind, Bounds, Variant};
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::surrogate::{sample_posterior_function, GpModel, PosteriorSample};

pub const RAW_CANDIDATES: usize = 512;
pub const RAW_CANDIDATES_TS: usize = 1024;
pub const REFINE_STARTS: usize = 10;
pub const REFINE_STARTS_TS: usize = 20;
pub const REFINE_STEPS: usize = 50;
pub const MES_SAMPLES: usize = 10;
pub const RAASP_SIGMA: f64 = 0.2;
pub const MIN_SEPARATION: f64 = 1e-6;

/// Candidate points, flagged when they were generated around the incumbent.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub points: Vec<Vec<f64>>,
    pub local: Vec<bool>,
}

/// Bookkeeping from one maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Acquisition value at the returned point.
    pub value: f64,
    /// Largest acquisition value among the raw candidates.
    pub raw_best: f64,
    pub raw_evaluated: usize,
}

/// Points chosen in one step, with one report per optimized point.
#[derive(Debug, Clone)]
pub struct Selection {
    pub points: Vec<Vec<f64>>,
    pub reports: Vec<SearchReport>,
}

/// What the selection step may look at besides the spec and bounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchContext<'a> {
    pub model: Option<&'a GpModel>,
    /// Point repeated by deterministic selection.
    pub fixed_point: Option<&'a [f64]>,
}

enum Objective<'a> {
    Ei { model: &'a GpModel, best: f64 },
    Pi { model: &'a GpModel, best: f64 },
    Ucb { model: &'a GpModel, beta: f64 },
    Mes { model: &'a GpModel, maxima: Vec<f64> },
    Ts(PosteriorSample),
    Kg(KgEvaluator<'a>),
}

impl Objective<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Objective::Ei { model, best } => {
                let (m, v) = model.predict_standardized(x);
                ei(m, v, *best)
            }
            Objective::Pi { model, best } => {
                let (m, v) = model.predict_standardized(x);
                pi(m, v, *best)
            }
            Objective::Ucb { model, beta } => {
                let (m, v) = model.predict_standardized(x);
                ucb(m, v, *beta)
            }
            Objective::Mes { model, maxima } => {
                let (m, v) = model.predict_standardized(x);
                let s = v.sqrt();
                if s == 0.0 {
                    return 0.0;
                }
                maxima.iter().map(|y| mes_term((y - m) / s)).sum::<f64>() / maxima.len() as f64
            }
            Objective::Ts(sample) => sample.eval(x),
            Objective::Kg(k) => k.value(x),
        }
    }
}

fn objective<'a, R: Rng + ?Sized>(model: &'a GpModel, spec: &AcquisitionSpec, rng: &mut R) -> Objective<'a> {
    match spec.kind() {
        AfKind::Ei => Objective::Ei { model, best: model.standardized_incumbent() },
        AfKind::Pi => Objective::Pi { model, best: model.standardized_incumbent() },
        AfKind::Ucb => Objective::Ucb { model, beta: spec.beta().unwrap_or(0.0) },
        AfKind::Mes => Objective::Mes { model, maxima: standardized_max_samples(model, MES_SAMPLES, rng.gen()) },
        AfKind::Ts => Objective::Ts(sample_posterior_function(model, rng.gen())),
        AfKind::Kg => {
            let mut r = rng::stream(rng.gen(), &[rng::label("kg-grid")]);
            let grid = rng::halton(KG_INNER_GRID, model.dim(), &mut r);
            Objective::Kg(KgEvaluator::new(model, grid, fantasy_normals(KG_FANTASIES, rng.gen())))
        }
        AfKind::Rs | AfKind::Dm => unreachable!("model-free kinds have no objective"),
    }
}

fn too_close(x: &[f64], taken: &[Vec<f64>]) -> bool {
    taken.iter().any(|t| {
        let d2: f64 = t.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 < MIN_SEPARATION * MIN_SEPARATION
    })
}

fn truncated_normal<R: Rng + ?Sized>(center: f64, rng: &mut R) -> f64 {
    let n = Normal::new(center, RAASP_SIGMA).expect("positive scale");
    loop {
        let v: f64 = n.sample(rng);
        if (0.0..=1.0).contains(&v) {
            return v;
        }
    }
}

/// Candidates that mostly perturb a few coordinates of the incumbent.
///
/// Each candidate is local with probability `min(1, 20/d)`; a local candidate
/// resamples each coordinate with that same probability (at least one) from a
/// normal of scale 0.2 around the incumbent, truncated to `[0, 1]`. The rest
/// are uniform draws.
pub fn raasp_candidates<R: Rng + ?Sized>(incumbent: &[f64], n: usize, rng: &mut R) -> CandidateSet {
    let d = incumbent.len();
    let p = (20.0 / d as f64).min(1.0);
    let mut points = Vec::with_capacity(n);
    let mut local = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen::<f64>() < p {
            let mut x = incumbent.to_vec();
            let mut mask: Vec<bool> = (0..d).map(|_| rng.gen::<f64>() < p).collect();
            if !mask.iter().any(|&m| m) {
                mask[rng.gen_range(0..d)] = true;
            }
            for (v, m) in x.iter_mut().zip(mask) {
                if m {
                    *v = truncated_normal(*v, rng);
                }
            }
            points.push(x);
            local.push(true);
        } else {
            points.push((0..d).map(|_| rng.gen::<f64>()).collect());
            local.push(false);
        }
    }
    CandidateSet { points, local }
}

fn uniform_in<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds.lo().iter().zip(bounds.hi()).map(|(&l, &h)| l + rng.gen::<f64>() * (h - l)).collect()
}

fn raw_candidates<R: Rng + ?Sized>(n: usize, bounds: &Bounds, raasp_center: Option<&[f64]>, rng: &mut R) -> Vec<Vec<f64>> {
    match raasp_center {
        Some(c) => {
            let mut pts = raasp_candidates(c, n, rng).points;
            for p in &mut pts {
                bounds.clip(p);
            }
            pts
        }
        None => {
            let mut pts = rng::halton(n, bounds.dim(), rng);
            rng::into_box(&mut pts, bounds.lo(), bounds.hi());
            pts
        }
    }
}

/// Finite-difference gradient ascent inside `bounds`; never returns a worse point.
fn refine(f: &dyn Fn(&[f64]) -> f64, start: &[f64], f0: f64, bounds: &Bounds) -> (Vec<f64>, f64) {
    let widths: Vec<f64> = bounds.lo().iter().zip(bounds.hi()).map(|(l, h)| h - l).collect();
    let mut x = start.to_vec();
    let mut fx = f0;
    let mut step = 0.05;
    let mut grad = vec![0.0; x.len()];
    let mut fresh = false;
    for _ in 0..REFINE_STEPS {
        if !fresh {
            for j in 0..x.len() {
                let h = 1e-6 * widths[j];
                let mut y = x.clone();
                let sign = if y[j] + h <= bounds.hi()[j] { 1.0 } else { -1.0 };
                y[j] += sign * h;
                // gradient in box-scaled coordinates
                grad[j] = sign * (f(&y) - fx) / h * widths[j];
            }
            fresh = true;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(norm > 0.0) || step < 1e-9 {
            break;
        }
        let mut y: Vec<f64> = x.iter().zip(&grad).zip(&widths).map(|((v, g), w)| v + step * g / norm * w).collect();
        bounds.clip(&mut y);
        let fy = f(&y);
        if fy > fx {
            x = y;
            fx = fy;
            step *= 1.5;
            fresh = false;
        } else {
            step *= 0.5;
        }
    }
    (x, fx)
}

fn nan_low(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Evaluate candidates, refine the best few, keep the best point not within
/// [`MIN_SEPARATION`] of `taken`.
fn search(f: &dyn Fn(&[f64]) -> f64, candidates: Vec<Vec<f64>>, starts: usize, bounds: &Bounds, taken: &[Vec<f64>]) -> Option<(Vec<f64>, SearchReport)> {
    let raw_evaluated = candidates.len();
    let mut scored: Vec<(f64, Vec<f64>)> = candidates.into_iter().map(|x| (nan_low(f(&x)), x)).collect();
    let raw_best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    scored.retain(|(_, x)| !too_close(x, taken));
    // stable sort keeps generation order among ties
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (v, x) in scored.iter().take(starts) {
        let (mut y, mut fy) = refine(f, x, *v, bounds);
        if too_close(&y, taken) {
            (y, fy) = (x.clone(), *v);
        }
        if best.as_ref().is_none_or(|(_, b)| fy > *b) {
            best = Some((y, fy));
        }
    }
    best.map(|(x, value)| (x, SearchReport { value, raw_best, raw_evaluated }))
}

fn fallback_point<R: Rng + ?Sized>(bounds: &Bounds, taken: &[Vec<f64>], rng: &mut R) -> Vec<f64> {
    loop {
        let x = uniform_in(bounds, rng);
        if !too_close(&x, taken) {
            return x;
        }
    }
}

fn select_one<R: Rng + ?Sized>(model: &GpModel, spec: &AcquisitionSpec, bounds: &Bounds, taken: &[Vec<f64>], rng: &mut R) -> (Vec<f64>, Option<SearchReport>) {
    let (n_raw, starts) = if spec.kind() == AfKind::Ts { (RAW_CANDIDATES_TS, REFINE_STARTS_TS) } else { (RAW_CANDIDATES, REFINE_STARTS) };
    let obj = objective(model, spec, rng);
    let center = spec.has(Variant::Raasp).then(|| model.incumbent_point());
    let candidates = raw_candidates(n_raw, bounds, center, rng);
    let f = |x: &[f64]| obj.value(x);
    match search(&f, candidates, starts, bounds, taken) {
        Some((x, report)) => (x, Some(report)),
        None => (fallback_point(bounds, taken, rng), None),
    }
}

fn check_bounds(bounds: &Bounds, d: Option<usize>) -> Result<()> {
    if let Some(d) = d {
        if bounds.dim() != d {
            return invalid(format!("bounds have {} coordinates, problem has {d}", bounds.dim()));
        }
    }
    Ok(())
}

/// Kriging-believer batch of `q` distinct points.
///
/// After each pick the model is conditioned on its own posterior mean there;
/// Thompson sampling instead draws a fresh posterior function per point.
pub fn batch_select<R: Rng + ?Sized>(model: &GpModel, spec: &AcquisitionSpec, bounds: &Bounds, q: usize, rng: &mut R) -> Result<Selection> {
    if !matches!(spec.kind(), AfKind::Ei | AfKind::Ucb | AfKind::Ts | AfKind::Kg) {
        return Err(Error::InvalidConfig(format!("{} cannot be batched", spec.kind().name())));
    }
    if q == 0 {
        return Err(Error::InvalidConfig("batch size must be at least 1".into()));
    }
    spec.validate_for_dim(model.dim())?;
    check_bounds(bounds, Some(model.dim()))?;
    let mut current = model.clone();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(q);
    let mut reports = Vec::with_capacity(q);
    for i in 0..q {
        let (x, report) = select_one(&current, spec, bounds, &points, rng);
        reports.extend(report);
        if spec.kind() != AfKind::Ts && i + 1 < q {
            let (mu, _) = current.predict(&x)?;
            if let Ok(next) = current.condition_on(&x, mu) {
                current = next;
            }
        }
        points.push(x);
    }
    Ok(Selection { points, reports })
}

/// Choose the next point, or `q` points for batched specs, inside `bounds`.
pub fn maximize_af<R: Rng + ?Sized>(ctx: &SearchContext<'_>, spec: &AcquisitionSpec, bounds: &Bounds, rng: &mut R) -> Result<Selection> {
    check_bounds(bounds, ctx.model.map(|m| m.dim()))?;
    let q = spec.q();
    match spec.kind() {
        AfKind::Rs => {
            let mut points: Vec<Vec<f64>> = Vec::with_capacity(q);
            for _ in 0..q {
                let x = fallback_point(bounds, &points, rng);
                points.push(x);
            }
            Ok(Selection { points, reports: Vec::new() })
        }
        AfKind::Dm => {
            let p = ctx.fixed_point.ok_or_else(|| Error::State("deterministic selection needs a fixed point".into()))?;
            check_bounds(bounds, Some(p.len()))?;
            Ok(Selection { points: vec![p.to_vec()], reports: Vec::new() })
        }
        _ => {
            let model = ctx.model.ok_or_else(|| Error::State(format!("{} needs a fitted model", spec.kind().name())))?;
            spec.validate_for_dim(model.dim())?;
            if q > 1 {
                return batch_select(model, spec, bounds, q, rng);
            }
            let (x, report) = select_one(model, spec, bounds, &[], rng);
            Ok(Selection { points: vec![x], reports: report.into_iter().collect() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::KernelParams;

    fn model(d: usize) -> GpModel {
        let mut r = rng::stream(21, &[]);
        let x: Vec<Vec<f64>> = (0..12).map(|_| (0..d).map(|_| r.gen()).collect()).collect();
        let y: Vec<f64> = x.iter().map(|p| -p.iter().map(|v| (v - 0.4) * (v - 0.4)).sum::<f64>()).collect();
        GpModel::with_params(&x, &y, KernelParams::new(vec![0.3; d], 1.0, 1e-6).unwrap()).unwrap()
    }

    fn all_kinds() -> Vec<AcquisitionSpec> {
        let mut v: Vec<AcquisitionSpec> = [AfKind::Ei, AfKind::Pi, AfKind::Mes, AfKind::Ts, AfKind::Kg].iter().map(|&k| AcquisitionSpec::new(k).unwrap()).collect();
        v.push(AcquisitionSpec::ucb(2.0).unwrap());
        v
    }

    #[test]
    fn refined_value_dominates_raw_candidates() {
        let m = model(3);
        for spec in all_kinds() {
            let mut r = rng::stream(1, &[]);
            let s = maximize_af(&SearchContext { model: Some(&m), fixed_point: None }, &spec, &Bounds::unit(3), &mut r).unwrap();
            let rep = &s.reports[0];
            assert!(rep.value >= rep.raw_best, "{spec}: {} < {}", rep.value, rep.raw_best);
            assert!(Bounds::unit(3).contains(&s.points[0]));
        }
    }

    #[test]
    fn result_inside_sub_box() {
        let m = model(2);
        let b = Bounds::new(vec![0.7, 0.1], vec![0.9, 0.2]).unwrap();
        for spec in all_kinds() {
            let spec = spec.with_variant(Variant::Raasp);
            let mut r = rng::stream(2, &[]);
            let s = maximize_af(&SearchContext { model: Some(&m), fixed_point: None }, &spec, &b, &mut r).unwrap();
            assert!(b.contains(&s.points[0]), "{spec}: {:?}", s.points[0]);
        }
    }

    #[test]
    fn dm_repeats_fixed_point_and_rs_stays_in_bounds() {
        let dm = AcquisitionSpec::new(AfKind::Dm).unwrap();
        let p = [0.25, 0.75];
        let ctx = SearchContext { model: None, fixed_point: Some(&p) };
        for i in 0..5 {
            let mut r = rng::stream(i, &[]);
            assert_eq!(maximize_af(&ctx, &dm, &Bounds::unit(2), &mut r).unwrap().points, vec![p.to_vec()]);
        }
        let rs = AcquisitionSpec::new(AfKind::Rs).unwrap().with_batch(4).unwrap();
        let b = Bounds::new(vec![0.5, 0.5], vec![0.6, 0.7]).unwrap();
        let s = maximize_af(&ctx, &rs, &b, &mut rng::stream(0, &[])).unwrap();
        assert_eq!(s.points.len(), 4);
        assert!(s.points.iter().all(|x| b.contains(x)));
    }

    #[test]
    fn model_kinds_need_a_model() {
        let ctx = SearchContext::default();
        let ei = AcquisitionSpec::new(AfKind::Ei).unwrap();
        assert!(matches!(maximize_af(&ctx, &ei, &Bounds::unit(2), &mut rng::stream(0, &[])), Err(Error::State(_))));
    }

    #[test]
    fn deterministic_given_rng() {
        let m = model(2);
        let ctx = SearchContext { model: Some(&m), fixed_point: None };
        for spec in all_kinds() {
            let a = maximize_af(&ctx, &spec, &Bounds::unit(2), &mut rng::stream(7, &[])).unwrap();
            let b = maximize_af(&ctx, &spec, &Bounds::unit(2), &mut rng::stream(7, &[])).unwrap();
            assert_eq!(a.points, b.points);
        }
    }

    #[test]
    fn single_batch_equals_sequential_choice() {
        let m = model(2);
        let ctx = SearchContext { model: Some(&m), fixed_point: None };
        let spec = AcquisitionSpec::new(AfKind::Ei).unwrap();
        let a = maximize_af(&ctx, &spec, &Bounds::unit(2), &mut rng::stream(3, &[])).unwrap();
        let b = batch_select(&m, &spec, &Bounds::unit(2), 1, &mut rng::stream(3, &[])).unwrap();
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn batch_points_are_distinct() {
        let m = model(2);
        for spec in [AcquisitionSpec::new(AfKind::Ei).unwrap(), AcquisitionSpec::ucb(1.0).unwrap(), AcquisitionSpec::new(AfKind::Ts).unwrap()] {
            let s = batch_select(&m, &spec, &Bounds::unit(2), 8, &mut rng::stream(5, &[])).unwrap();
            assert_eq!(s.points.len(), 8);
            for i in 0..8 {
                assert!(!too_close(&s.points[i], &s.points[..i]), "{spec}");
            }
        }
        let pi = AcquisitionSpec::new(AfKind::Pi).unwrap();
        assert!(batch_select(&m, &pi, &Bounds::unit(2), 4, &mut rng::stream(5, &[])).is_err());
    }

    #[test]
    fn believer_mean_equals_believed_value() {
        let m = model(3);
        let x = [0.2, 0.9, 0.5];
        let (mu, _) = m.predict(&x).unwrap();
        let c = m.condition_on(&x, mu).unwrap();
        assert!((c.predict(&x).unwrap().0 - mu).abs() < 1e-6);
    }

    #[test]
    fn argmax_invariant_to_shifted_targets() {
        let m = model(2);
        let shifted_y: Vec<f64> = m.standardized_targets().iter().map(|y| y * m.target_std() + m.target_mean() + 17.0).collect();
        let shifted = GpModel::with_params(m.inputs(), &shifted_y, m.params().clone()).unwrap();
        let spec = AcquisitionSpec::new(AfKind::Ei).unwrap();
        let a = maximize_af(&SearchContext { model: Some(&m), fixed_point: None }, &spec, &Bounds::unit(2), &mut rng::stream(8, &[])).unwrap();
        let b = maximize_af(&SearchContext { model: Some(&shifted), fixed_point: None }, &spec, &Bounds::unit(2), &mut rng::stream(8, &[])).unwrap();
        for (p, q) in a.points[0].iter().zip(&b.points[0]) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn raasp_locality() {
        let mut r = rng::stream(3, &[]);
        let c = raasp_candidates(&[0.5; 4], 200, &mut r);
        assert!(c.local.iter().all(|&l| l));
        let inc = vec![0.999; 40];
        let c = raasp_candidates(&inc, 10_000, &mut r);
        let frac = c.local.iter().filter(|&&l| l).count() as f64 / 1e4;
        assert!((frac - 0.5).abs() <= 3.0 * (0.25f64 / 1e4).sqrt(), "{frac}");
        assert!(c.points.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
