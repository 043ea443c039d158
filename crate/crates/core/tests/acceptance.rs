//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! Run with `cargo test -p boexplore-core --test acceptance -- --nocapture`.
//! Optimizer runs are cached and shared between criteria: a run with a
//! larger budget serves every shorter budget as its prefix.

use std::collections::{BTreeMap, HashMap};
use std::io::Write as _;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use boexplore::acquisition::{ei, pi, AcquisitionSpec, AfKind, Variant};
use boexplore::analysis::{self, fractional_ranks_desc, mean_relative_ranking, Measure, RankDirection};
use boexplore::benchmarks::Benchmark;
use boexplore::harness::run_single;
use boexplore::metrics::{self, exact_tsp, neighbor_order, oe, prefix_tour_lengths, MetricKind};
use boexplore::rng;
use boexplore::surrogate::{sample_posterior_function, GpModel, KernelParams};
use boexplore::{ObservationTrace, TraceMeta};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const SEEDS: u64 = 10;
const DOE: usize = 10;

fn verdict(id: &str, pass: bool, detail: &str) {
    // written past the test harness's capture so passing criteria also report
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    let _ = out.flush();
    drop(out);
    assert!(pass, "criterion {id} failed: {detail}");
}

/// Held by every criterion so wall-clock limits are not shared with concurrently running tests.
fn serial() -> std::sync::MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

// ---------------------------------------------------------------- run cache

type Cell = Arc<OnceLock<ObservationTrace>>;
type RunCache = Mutex<HashMap<(String, String, u64), Cell>>;

fn cache() -> &'static RunCache {
    static C: OnceLock<RunCache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Longest budget any criterion asks of this (benchmark, method).
fn planned_budget(bench: &str, spec: &AcquisitionSpec, asked: usize) -> usize {
    let label = spec.to_string();
    let shared = ["rs", "ucb5", "ei", "pi", "ucb0.1", "dm"];
    let mut b = asked;
    if bench == "hartmann6" && shared.contains(&label.as_str()) {
        b = b.max(150);
    }
    if spec.q() > 1 {
        // smallest budget at or above the request that fits whole batches
        while !(b - DOE).is_multiple_of(spec.q()) {
            b += 1;
        }
    }
    b
}

fn run(bench: &str, spec: &AcquisitionSpec, seed: u64, budget: usize) -> ObservationTrace {
    let cell = {
        let mut c = cache().lock().unwrap();
        c.entry((bench.to_string(), spec.to_string(), seed)).or_default().clone()
    };
    let full = cell.get_or_init(|| {
        let b = Benchmark::by_name(bench).unwrap();
        run_single(&b, spec, seed, DOE, planned_budget(bench, spec, budget)).unwrap().trace
    });
    assert!(full.len() >= budget);
    ObservationTrace::from_parts(full.points()[..budget].to_vec(), full.values()[..budget].to_vec(), full.meta.clone()).unwrap()
}

fn runs(bench: &str, spec: &AcquisitionSpec, budget: usize) -> Vec<ObservationTrace> {
    (0..SEEDS).map(|s| run(bench, spec, s, budget)).collect()
}

fn ucb(beta: f64) -> AcquisitionSpec {
    AcquisitionSpec::ucb(beta).unwrap()
}

fn plain(kind: AfKind) -> AcquisitionSpec {
    AcquisitionSpec::new(kind).unwrap()
}

fn terminal_mean(traces: &[ObservationTrace], kind: MetricKind) -> (f64, f64) {
    let s = analysis::aggregate(traces, Measure::Metric(kind)).unwrap();
    (s.terminal(), s.terminal_sem())
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_heuristic_within_twice_optimum() {
    let _serial = serial();
    let start = Instant::now();
    let mut r = rng::stream(1, &[rng::label("acceptance")]);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = r.gen_range(4..=9);
        let d = [2, 3, 6][r.gen_range(0..3)];
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.gen()).collect()).collect();
        let heuristic = *prefix_tour_lengths(&pts).unwrap().last().unwrap();
        let opt = exact_tsp(&pts).unwrap();
        worst = worst.max(heuristic / opt);
        if heuristic > 2.0 * opt * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    let el = start.elapsed();
    verdict("1", violations == 0 && within(el, 60), &format!("200 instances, {violations} violations, worst ratio {worst:.4}, {el:.2?}"));
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_2_uniform_traces_below_bound() {
    let _serial = serial();
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [3, 10, 50, 100] {
        let traces = analysis::uniform_traces(d, 1000, 20, 2).unwrap();
        let rep = analysis::verify_otsd_bound(&traces).unwrap();
        let max = rep.rows.iter().map(|r| r.max_normalized).fold(0.0, f64::max);
        let terms: Vec<f64> = rep.rows.iter().map(|r| r.terminal).collect();
        let mean = terms.iter().sum::<f64>() / terms.len() as f64;
        let spread = (terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - terms.iter().cloned().fold(f64::INFINITY, f64::min)) / mean;
        ok &= max < 1.0 && spread < 0.10;
        parts.push(format!("d={d} max={max:.4} spread={:.2}%", 100.0 * spread));
    }
    let el = start.elapsed();
    verdict("2", ok && within(el, 300), &format!("{}, {el:.2?}", parts.join("; ")));
}

// ---------------------------------------------------------------- criterion 3

fn oe_reps(d: usize, sample: impl Fn(&mut rng::StreamRng) -> f64, target: f64, tol: f64) -> (usize, Vec<f64>) {
    let mut hits = 0;
    let mut errs = Vec::new();
    for rep in 0..20u64 {
        let mut r = rng::stream(3, &[rng::label("oe-acceptance"), d as u64, rep]);
        let pts: Vec<Vec<f64>> = (0..2000).map(|_| (0..d).map(|_| sample(&mut r)).collect()).collect();
        let v = oe(&pts, neighbor_order(2000)).unwrap();
        errs.push(v - target);
        if (v - target).abs() <= tol {
            hits += 1;
        }
    }
    (hits, errs)
}

fn oe_line(id: &str, d: usize, sample: impl Fn(&mut rng::StreamRng) -> f64, target: f64, tol: f64) {
    let start = Instant::now();
    let (hits, errs) = oe_reps(d, sample, target, tol);
    let mean_err = errs.iter().sum::<f64>() / errs.len() as f64;
    let el = start.elapsed();
    verdict(id, hits >= 18 && within(el, 120), &format!("d={d}: {hits}/20 within {tol} (mean error {mean_err:+.4}), {el:.2?}"));
}

#[test]
fn criterion_3a_uniform_entropy_d2() {
    let _serial = serial();
    oe_line("3a(d=2)", 2, |r| r.gen::<f64>(), 0.0, 0.1);
}

#[test]
fn criterion_3a_uniform_entropy_d6() {
    let _serial = serial();
    oe_line("3a(d=6)", 6, |r| r.gen::<f64>(), 0.0, 0.3);
}

#[test]
fn criterion_3b_gaussian_entropy() {
    let _serial = serial();
    let target = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    oe_line("3b", 2, |r| StandardNormal.sample(r), target, 0.15);
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_ucb_beta_ordering() {
    let _serial = serial();
    let start = Instant::now();
    let betas = [0.1, 1.0, 5.0];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut oe_scores: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for bench in ["hartmann6", "branin2"] {
        let means: Vec<f64> = betas.iter().map(|&b| terminal_mean(&runs(bench, &ucb(b), 100), MetricKind::Otsd).0).collect();
        ok &= means[0] < means[1] && means[1] < means[2];
        parts.push(format!("{bench} OTSD {:.3} < {:.3} < {:.3}", means[0], means[1], means[2]));
        let row = oe_scores.entry(bench.to_string()).or_default();
        for &b in &betas {
            row.insert(format!("ucb{b}"), vec![terminal_mean(&runs(bench, &ucb(b), 100), MetricKind::Oe).0]);
        }
    }
    let table = mean_relative_ranking(&oe_scores, &[100], RankDirection::OeReversed).unwrap();
    let ranks: Vec<f64> = betas.iter().map(|b| table.terminal(&format!("ucb{b}")).unwrap()).collect();
    ok &= ranks[0] < ranks[1] && ranks[1] < ranks[2];
    parts.push(format!("OE mean rank {:.2} < {:.2} < {:.2}", ranks[0], ranks[1], ranks[2]));
    let el = start.elapsed();
    verdict("4", ok && within(el, 1800), &format!("{}, {el:.2?}", parts.join("; ")));
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_variant_directionality() {
    let _serial = serial();
    let start = Instant::now();
    let ei = plain(AfKind::Ei);
    let methods = [
        ("ei+tr", ei.clone().with_variant(Variant::TrustRegion)),
        ("ei+raasp", ei.clone().with_variant(Variant::Raasp)),
        ("ei", ei.clone()),
        ("ei+q8", ei.clone().with_batch(8).unwrap()),
        ("ei+q32", ei.clone().with_batch(32).unwrap()),
    ];
    let v: BTreeMap<&str, f64> = methods.iter().map(|(n, s)| (*n, terminal_mean(&runs("hartmann6", s, 100), MetricKind::OtsdNorm).0)).collect();
    let relations = [("ei+tr", "ei"), ("ei+raasp", "ei"), ("ei", "ei+q8"), ("ei+q8", "ei+q32")];
    let inversions: Vec<String> = relations.iter().filter(|(a, b)| v[a] >= v[b] || v[a].is_nan() || v[b].is_nan()).map(|(a, b)| format!("{a} !< {b}")).collect();
    let el = start.elapsed();
    let detail = format!(
        "tr {:.4}, raasp {:.4}, ei {:.4}, q8 {:.4}, q32 {:.4}; inversions: {}, {el:.2?}",
        v["ei+tr"],
        v["ei+raasp"],
        v["ei"],
        v["ei+q8"],
        v["ei+q32"],
        if inversions.is_empty() { "none".to_string() } else { inversions.join(", ") }
    );
    verdict("5", inversions.len() <= 1 && within(el, 2700), &detail);
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_taxonomy_spot_check() {
    let _serial = serial();
    let start = Instant::now();
    let specs = [("rs", plain(AfKind::Rs)), ("ucb5", ucb(5.0)), ("ei", plain(AfKind::Ei)), ("pi", plain(AfKind::Pi)), ("ucb0.1", ucb(0.1)), ("dm", plain(AfKind::Dm))];
    let mut agg = BTreeMap::new();
    let mut all = Vec::new();
    for (name, spec) in &specs {
        let mut traces = runs("hartmann6", spec, 150);
        traces.extend(runs("griewank8", spec, 150));
        agg.insert(*name, terminal_mean(&traces, MetricKind::OtsdNorm));
        all.extend(traces);
    }
    let geq = |a: &str, b: &str| {
        let ((ma, sa), (mb, sb)) = (agg[a], agg[b]);
        ma > mb || (ma - mb).abs() <= (sa * sa + sb * sb).sqrt()
    };
    let checks = [("rs", "ucb5"), ("ei", "pi"), ("ucb0.1", "dm")];
    let failed: Vec<String> = checks.iter().filter(|(a, b)| !geq(a, b)).map(|(a, b)| format!("{a} < {b}")).collect();
    let (first_t, scores) = analysis::problem_means(&all, Measure::Metric(MetricKind::OtsdNorm)).unwrap();
    let t: Vec<usize> = (first_t..=150).collect();
    let ranks = mean_relative_ranking(&scores, &t, RankDirection::OeReversed).unwrap();
    let summary: Vec<String> = specs
        .iter()
        .map(|(n, _)| format!("{n} {:.4}±{:.4} (rank {:.1})", agg[n].0, agg[n].1, ranks.terminal(n).unwrap()))
        .collect();
    let el = start.elapsed();
    let detail = format!("{}; failed: {}, {el:.2?}", summary.join(", "), if failed.is_empty() { "none".into() } else { failed.join(", ") });
    verdict("6", failed.is_empty() && within(el, 3600), &detail);
}

// ---------------------------------------------------------------- criterion 7

fn uniform_trace(d: usize, t: usize, seed: u64) -> ObservationTrace {
    analysis::uniform_traces(d, t, 1, seed).unwrap().remove(0)
}

#[test]
fn criterion_7_runtime_targets() {
    let _serial = serial();
    let timed = |f: &dyn Fn()| {
        let s = Instant::now();
        f();
        s.elapsed()
    };
    let a = uniform_trace(10, 1000, 7);
    let b = uniform_trace(1000, 1000, 7);
    let c = uniform_trace(20, 1000, 7);
    let ta = timed(&|| {
        metrics::otsd_series(&a).unwrap();
    });
    let tb = timed(&|| {
        metrics::otsd_series(&b).unwrap();
    });
    let tc = timed(&|| {
        metrics::oe_series(&c).unwrap();
    });
    let ok = ta < Duration::from_secs(1) && tb < Duration::from_secs(2) && tc < Duration::from_secs(30);
    verdict("7", ok, &format!("OTSD d=10 {ta:.2?} (<1s), OTSD d=1000 {tb:.2?} (<2s), OE d=20 {tc:.2?} (<30s)"));
}

// ---------------------------------------------------------------- criterion 8

/// Family-wise threshold for Monte-Carlo checks repeated over 100 random cases.
const MC_Z: f64 = 4.5;

fn runner(tag: &str) -> TestRunner {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&rng::label(tag).to_le_bytes());
    TestRunner::new_with_rng(Config { cases: 100, failure_persistence: None, ..Config::default() }, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

fn points(d: std::ops::Range<usize>, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (d, n).prop_flat_map(|(d, n)| prop::collection::vec(prop::collection::vec(0.0f64..1.0, d), n))
}

fn check_otsd_monotone() -> Result<(), String> {
    runner("otsd-monotone")
        .run(&points(1..8, 2..60), |pts| {
            let s = prefix_tour_lengths(&pts).unwrap();
            prop_assert_eq!(s[0], 0.0);
            for w in s.windows(2) {
                prop_assert!(w[1] >= w[0], "{} then {}", w[0], w[1]);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn check_oe_invariances() -> Result<(), String> {
    let strat = (points(1..6, 5..80), any::<u64>(), prop::collection::vec(-3.0f64..3.0, 6), 0.1f64..10.0);
    runner("oe-invariance")
        .run(&strat, |(pts, perm_seed, shift, s)| {
            let d = pts[0].len();
            let k = neighbor_order(pts.len());
            let base = oe(&pts, k).unwrap();
            let mut permuted = pts.clone();
            let mut r = rng::stream(perm_seed, &[]);
            for i in (1..permuted.len()).rev() {
                permuted.swap(i, r.gen_range(0..=i));
            }
            prop_assert!((oe(&permuted, k).unwrap() - base).abs() < 1e-9);
            let shifted: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect();
            prop_assert!((oe(&shifted, k).unwrap() - base).abs() < 1e-9);
            let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|a| a * s).collect()).collect();
            let diff = oe(&scaled, k).unwrap() - base;
            prop_assert!((diff - d as f64 * s.ln()).abs() < 1e-9, "{} vs {}", diff, d as f64 * s.ln());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn check_gp_posterior_mc() -> Result<(), String> {
    let strat = (points(1..4, 3..9), 0.1f64..1.0, 0.3f64..3.0, prop::collection::vec(0.0f64..1.0, 3), any::<u64>());
    runner("gp-mc")
        .run(&strat, |(x, ls, sv, q, seed)| {
            let d = x[0].len();
            let y: Vec<f64> = x.iter().map(|p| p.iter().map(|v| (5.0 * v).sin()).sum()).collect();
            let model = match GpModel::with_params(&x, &y, KernelParams::new(vec![ls; d], sv, 1e-4).unwrap()) {
                Ok(m) => m,
                Err(_) => return Ok(()),
            };
            let q = &q[..d];
            let draws = 200;
            let vals: Vec<f64> = (0..draws).map(|i| sample_posterior_function(&model, seed.wrapping_add(i)).eval(q)).collect();
            let mean = vals.iter().sum::<f64>() / draws as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
            let (mu, s2) = model.predict(q).unwrap();
            let se_mean = (s2 / draws as f64).sqrt();
            let se_var = s2 * (2.0 / (draws - 1) as f64).sqrt();
            prop_assert!((mean - mu).abs() <= MC_Z * se_mean + 1e-6, "mean {} vs {}", mean, mu);
            prop_assert!((var - s2).abs() <= MC_Z * se_var + 1e-6, "var {} vs {}", var, s2);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn check_ei_pi_mc() -> Result<(), String> {
    let strat = (-3.0f64..3.0, 0.05f64..3.0, -3.0f64..3.0, any::<u64>());
    runner("ei-pi-mc")
        .run(&strat, |(mu, sd, best, seed)| {
            let n = 100_000;
            let mut r = rng::stream(seed, &[]);
            let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0usize);
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(&mut r);
                let imp = (mu + sd * z - best).max(0.0);
                s1 += imp;
                s2 += imp * imp;
                hits += (imp > 0.0) as usize;
            }
            let nf = n as f64;
            let m = s1 / nf;
            // standard errors from the exact moments, so rare events do not shrink them to zero
            let z = (mu - best) / sd;
            let cdf = 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2);
            let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let second = sd * sd * ((z * z + 1.0) * cdf + z * pdf);
            let se = (second / nf).sqrt().max((s2 / nf - m * m).max(0.0).sqrt() / nf.sqrt());
            let p = hits as f64 / nf;
            let se_p = (cdf * (1.0 - cdf) / nf).sqrt().max(1.0 / nf);
            prop_assert!((ei(mu, sd * sd, best) - m).abs() <= MC_Z * se + 1e-12, "EI {} vs {}", ei(mu, sd * sd, best), m);
            prop_assert!((pi(mu, sd * sd, best) - p).abs() <= MC_Z * se_p, "PI {} vs {}", pi(mu, sd * sd, best), p);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn check_rank_invariants() -> Result<(), String> {
    let strat = (1usize..5, 2usize..7).prop_flat_map(|(p, m)| prop::collection::vec(prop::collection::vec(0u8..4, m), p));
    runner("rank-invariants")
        .run(&strat, |cells| {
            let m = cells[0].len();
            let total = (m * (m + 1)) as f64 / 2.0;
            let mut scores: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
            let mut transformed = scores.clone();
            for (pi, row) in cells.iter().enumerate() {
                let vals: Vec<f64> = row.iter().map(|&v| v as f64).collect();
                let ranks = fractional_ranks_desc(&vals);
                prop_assert!((ranks.iter().sum::<f64>() - total).abs() < 1e-12);
                for (mi, v) in vals.iter().enumerate() {
                    scores.entry(format!("p{pi}")).or_default().insert(format!("m{mi}"), vec![*v]);
                    transformed.entry(format!("p{pi}")).or_default().insert(format!("m{mi}"), vec![v.powi(3) + (0.5 * v).exp()]);
                }
            }
            for dir in [RankDirection::Performance, RankDirection::OeReversed] {
                let t = mean_relative_ranking(&scores, &[1], dir).unwrap();
                let sum: f64 = t.mean_rank.iter().map(|r| r[0]).sum();
                prop_assert!((sum - total).abs() < 1e-9);
                prop_assert!(t.mean_rank.iter().all(|r| (1.0..=m as f64).contains(&r[0])));
                prop_assert_eq!(t.mean_rank.clone(), mean_relative_ranking(&transformed, &[1], dir).unwrap().mean_rank);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

#[test]
fn criterion_8_property_suites() {
    let _serial = serial();
    type Suite = fn() -> Result<(), String>;
    let suites: [(&str, Suite); 5] = [
        ("otsd-monotone", check_otsd_monotone),
        ("oe-invariance", check_oe_invariances),
        ("gp-posterior-mc", check_gp_posterior_mc),
        ("ei-pi-mc", check_ei_pi_mc),
        ("rank-invariants", check_rank_invariants),
    ];
    let mut failures = Vec::new();
    for (name, f) in suites {
        if let Err(e) = f() {
            failures.push(format!("{name}: {e}"));
        }
    }
    let detail = if failures.is_empty() { "5 suites x 100 cases, 0 failures".to_string() } else { failures.join("; ") };
    verdict("8", failures.is_empty(), &detail);
}

#[test]
fn trace_meta_labels_match_cache_keys() {
    // guard for the run cache: method labels are what planned_budget matches on
    assert_eq!(ucb(0.1).to_string(), "ucb0.1");
    assert_eq!(ucb(5.0).to_string(), "ucb5");
    assert_eq!(plain(AfKind::Ei).with_batch(32).unwrap().to_string(), "ei+q32");
    let _ = TraceMeta::default();
}
