use boexplore::acquisition::{AcquisitionSpec, AfKind, Variant};
use boexplore::analysis::{aggregate, uniform_traces, verify_otsd_bound, Measure};
use boexplore::benchmarks::Benchmark;
use boexplore::harness::{read_trace, run_experiment, run_single, trace_file_name, ExperimentConfig};
use boexplore::metrics::{self, MetricKind};

fn spec(kind: AfKind) -> AcquisitionSpec {
    AcquisitionSpec::new(kind).unwrap()
}

#[test]
fn random_search_normalized_tour_below_one_in_d10() {
    let traces = uniform_traces(10, 200, 5, 11).unwrap();
    let rep = verify_otsd_bound(&traces).unwrap();
    assert!(rep.rows.iter().all(|r| r.max_normalized < 1.0), "{}", rep.table());
}

#[test]
fn large_beta_spreads_samples_more_than_small_beta() {
    let b = Benchmark::by_name("branin2").unwrap();
    let mut wide = Vec::new();
    let mut narrow = Vec::new();
    for seed in 0..3 {
        wide.push(run_single(&b, &AcquisitionSpec::ucb(100.0).unwrap(), seed, 10, 40).unwrap().trace);
        narrow.push(run_single(&b, &AcquisitionSpec::ucb(1.0).unwrap(), seed, 10, 40).unwrap().trace);
    }
    let w = aggregate(&wide, Measure::Metric(MetricKind::Otsd)).unwrap().terminal();
    let n = aggregate(&narrow, Measure::Metric(MetricKind::Otsd)).unwrap().terminal();
    assert!(w > n, "beta=100 tour {w}, beta=1 tour {n}");
}

#[test]
fn ei_beats_random_search_on_branin() {
    let b = Benchmark::by_name("branin2").unwrap();
    let best = |s: &AcquisitionSpec| {
        let traces: Vec<_> = (0..3).map(|seed| run_single(&b, s, seed, 10, 40).unwrap().trace).collect();
        aggregate(&traces, Measure::BestValue).unwrap().terminal()
    };
    let (e, r) = (best(&spec(AfKind::Ei)), best(&spec(AfKind::Rs)));
    assert!(e > r, "ei best {e}, rs best {r}");
}

#[test]
fn variants_and_batches_run_end_to_end() {
    let b = Benchmark::by_name("levy4").unwrap();
    let specs = [
        spec(AfKind::Ei).with_variant(Variant::TrustRegion),
        spec(AfKind::Ei).with_variant(Variant::Raasp),
        spec(AfKind::Ts).with_batch(4).unwrap(),
        spec(AfKind::Kg),
        spec(AfKind::Mes),
        spec(AfKind::Dm),
    ];
    for s in &specs {
        let rec = run_single(&b, s, 3, 8, 16).unwrap();
        assert_eq!(rec.trace.len(), 16, "{s}");
        assert!(rec.trace.points().iter().flatten().all(|v| (0.0..=1.0).contains(v)), "{s}");
        let otsd = metrics::otsd_normalized(&rec.trace).unwrap();
        assert!(otsd.values.iter().all(|v| *v < 2.0), "{s}");
    }
}

#[test]
fn experiment_writes_readable_traces() {
    let dir = std::env::temp_dir().join(format!("boexplore-behaviour-{}", std::process::id()));
    let cfg = ExperimentConfig::from_toml(
        r#"
benchmarks = ["branin2"]
seeds = [0, 1]
doe_size = 5
budget = 9
[[afs]]
kind = "ucb"
beta = 2.0
[[afs]]
kind = "rs"
"#,
    )
    .unwrap();
    let records = run_experiment(&cfg, 2, Some(&dir)).unwrap();
    assert_eq!(records.len(), 4);
    for r in &records {
        let path = dir.join(trace_file_name(&r.trace.meta));
        assert_eq!(read_trace(&path).unwrap(), r.trace);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
