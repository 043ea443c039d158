//! Experiment runner: seeded design, fit, select, evaluate, repeat; traces persisted as JSONL.

mod config;
mod io;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

pub use config::ExperimentConfig;
pub use io::{format_trace, parse_points_unchecked, parse_trace, read_points_unchecked, read_trace, write_trace, TRACE_SCHEMA};

use crate::acquisition::{maximize_af, tr_update, AcquisitionSpec, Bounds, SearchContext, TrustRegionState, Variant};
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::rng;
use crate::surrogate::GpModel;
use crate::trace::{ObservationTrace, TraceMeta};

/// Relative gain over the incumbent that counts as a trust-region success.
const TR_IMPROVEMENT: f64 = 1e-3;

/// Outcome of one (benchmark, acquisition, seed) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub fingerprint: String,
    pub trace: ObservationTrace,
    /// Wall-clock seconds of each optimization step after the design.
    pub iteration_seconds: Vec<f64>,
    pub fit_failures: usize,
    pub tr_restarts: usize,
}

impl RunRecord {
    pub fn file_name(&self) -> String {
        trace_file_name(&self.trace.meta)
    }

    pub fn summary(&self) -> String {
        let m = &self.trace.meta;
        let best = self.trace.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let secs: f64 = self.iteration_seconds.iter().sum();
        format!(
            "{} {} seed={} evals={} best={best:.6} fit_failures={} seconds={secs:.2}",
            m.benchmark,
            m.method(),
            m.seed,
            self.trace.len(),
            self.fit_failures
        )
    }
}

pub fn trace_file_name(meta: &TraceMeta) -> String {
    format!("{}_{}_{}_{}.jsonl", meta.benchmark, meta.af, meta.variant, meta.seed)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Run one optimizer on one benchmark.
///
/// The random stream of step `k` depends only on the seed, the method, the
/// benchmark and `k`, so a shorter budget yields a prefix of a longer run.
pub fn run_single(bench: &Benchmark, spec: &AcquisitionSpec, seed: u64, doe_size: usize, budget: usize) -> Result<RunRecord> {
    if doe_size == 0 || budget < doe_size || !(budget - doe_size).is_multiple_of(spec.q()) {
        return Err(Error::InvalidConfig(format!("budget {budget} incompatible with doe_size {doe_size} and q = {}", spec.q())));
    }
    spec.validate_for_dim(bench.dim())?;
    let meta = TraceMeta { benchmark: bench.name().into(), af: spec.af_label(), variant: spec.variant_label(), seed, doe: doe_size };
    let mut trace = ObservationTrace::new(bench.dim(), meta)?;
    for (u, y) in bench.doe(doe_size, seed) {
        trace.push(u, y)?;
    }
    let fixed_point = trace.points()[argmax(trace.values())].clone();
    let mut tr = spec.has(Variant::TrustRegion).then(|| TrustRegionState::new(fixed_point.clone(), spec.q()));
    let method = rng::label(&spec.to_string());
    let bench_label = rng::label(bench.name());
    let mut iteration_seconds = Vec::new();
    let mut fit_failures = 0;

    let mut step = 0u64;
    while trace.len() < budget {
        let started = Instant::now();
        let mut r = rng::stream(seed, &[method, bench_label, step]);
        let fit_seed: u64 = r.gen();
        let model = if spec.kind().uses_model() {
            match GpModel::fit(trace.points(), trace.values(), fit_seed) {
                Ok(m) => Some(m),
                Err(_) => {
                    fit_failures += 1;
                    None
                }
            }
        } else {
            None
        };
        let bounds = match (&tr, &model) {
            (Some(state), Some(m)) => state.bounds(&m.params().lengthscales),
            _ => Bounds::unit(bench.dim()),
        };
        let points = if spec.kind().uses_model() && model.is_none() {
            (0..spec.q()).map(|_| (0..bench.dim()).map(|_| r.gen::<f64>()).collect()).collect()
        } else {
            let ctx = SearchContext { model: model.as_ref(), fixed_point: Some(&fixed_point) };
            maximize_af(&ctx, spec, &bounds, &mut r)?.points
        };
        let before = trace.values()[argmax(trace.values())];
        for x in points {
            let y = bench.evaluate(&x)?;
            trace.push(x, y)?;
        }
        if let Some(state) = tr.as_mut() {
            let after = trace.values()[argmax(trace.values())];
            let improved = after > before + TR_IMPROVEMENT * before.abs();
            let mut next = tr_update(state, improved);
            next.center = trace.points()[argmax(trace.values())].clone();
            *state = next;
        }
        iteration_seconds.push(started.elapsed().as_secs_f64());
        step += 1;
    }
    Ok(RunRecord { fingerprint: String::new(), trace, iteration_seconds, fit_failures, tr_restarts: tr.map_or(0, |s| s.restarts) })
}

/// Run the full matrix with up to `workers` concurrent runs.
///
/// When `output_dir` is given, each trace is written as soon as its run ends.
/// Records come back in config order: benchmark, then acquisition, then seed.
pub fn run_experiment(config: &ExperimentConfig, workers: usize, output_dir: Option<&Path>) -> Result<Vec<RunRecord>> {
    config.validate()?;
    if let Some(dir) = output_dir {
        std::fs::create_dir_all(dir)?;
    }
    let fingerprint = config.fingerprint();
    let mut jobs = Vec::new();
    for name in &config.benchmarks {
        let bench = Benchmark::by_name(name)?;
        for spec in &config.afs {
            for &seed in &config.seeds {
                jobs.push((bench.clone(), spec.clone(), seed));
            }
        }
    }
    let run = |(bench, spec, seed): &(Benchmark, AcquisitionSpec, u64)| -> Result<RunRecord> {
        let mut rec = run_single(bench, spec, *seed, config.doe_size, config.budget)?;
        rec.fingerprint = fingerprint.clone();
        if let Some(dir) = output_dir {
            let path: PathBuf = dir.join(rec.file_name());
            write_trace(&path, &rec.trace)?;
        }
        Ok(rec)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(run).collect())
}
