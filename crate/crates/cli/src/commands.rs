use std::fs;
use std::path::{Path, PathBuf};

use boexplore::analysis::{self, emit_plot_data, Measure, RankDirection, WideTable};
use boexplore::harness::{self, ExperimentConfig};
use boexplore::metrics::{self, MetricKind};
use boexplore::{rng, ObservationTrace};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use crate::failure::Failure;

fn located(path: &Path, e: boexplore::Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn read_one(path: &Path) -> Result<ObservationTrace, Failure> {
    harness::read_trace(path).map_err(|e| located(path, e))
}

/// Every `*.jsonl` file of `dir`, in file-name order.
fn trace_paths(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "jsonl")).collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::input(format!("no .jsonl traces in {}", dir.display())));
    }
    Ok(paths)
}

fn load_dir(dir: &Path) -> Result<Vec<ObservationTrace>, Failure> {
    trace_paths(dir)?.par_iter().map(|p| read_one(p)).collect()
}

pub fn run(config: &Path, workers: Option<usize>, out: Option<&Path>) -> Result<(), Failure> {
    let text = fs::read_to_string(config).map_err(|e| Failure::input(format!("{}: {e}", config.display())))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let dir = out.unwrap_or(&cfg.output_dir);
    let records = harness::run_experiment(&cfg, workers, Some(dir))?;
    for r in &records {
        println!("{}", r.summary());
    }
    println!("{} runs written to {} (config {})", records.len(), dir.display(), cfg.fingerprint());
    Ok(())
}

pub fn metrics(paths: &[PathBuf], kind: MetricKind, out: Option<&Path>) -> Result<(), Failure> {
    let csvs: Vec<(PathBuf, String)> = paths
        .par_iter()
        .map(|p| {
            let trace = read_one(p)?;
            let s = metrics::series(&trace, kind).map_err(|e| located(p, e))?;
            Ok((p.clone(), s.to_csv()))
        })
        .collect::<Result<_, Failure>>()?;
    match out {
        None if csvs.len() == 1 => print!("{}", csvs[0].1),
        None => {
            for (p, csv) in &csvs {
                println!("# {}", p.display());
                print!("{csv}");
            }
        }
        Some(file) if csvs.len() == 1 && file.extension().is_some_and(|x| x == "csv") => {
            fs::write(file, &csvs[0].1).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
        }
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
            for (p, csv) in &csvs {
                let stem = p.file_stem().map_or("trace".into(), |s| s.to_string_lossy().into_owned());
                let target = dir.join(format!("{stem}_{}.csv", kind.name()));
                fs::write(&target, csv).map_err(|e| Failure::input(format!("{}: {e}", target.display())))?;
            }
        }
    }
    Ok(())
}

pub fn analyze(dir: &Path, direction: RankDirection, out: &Path) -> Result<(), Failure> {
    let traces = load_dir(dir)?;
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let mut written = Vec::new();

    if traces.iter().all(|t| t.dim() >= 2) {
        let agg = analysis::aggregate_normalized_otsd(&analysis::group_by_method(traces.clone()))?;
        let first_t = agg.values().map(|s| s.first_t).max().unwrap_or(1);
        let last_t = agg.values().map(|s| s.first_t + s.mean.len() - 1).min().unwrap_or(first_t);
        let t: Vec<usize> = (first_t..=last_t).collect();
        let cut = |v: &[f64], f: usize| v[first_t - f..=last_t - f].to_vec();
        let mean = agg.iter().map(|(m, s)| (m.clone(), cut(&s.mean, s.first_t))).collect();
        let sem = agg.iter().map(|(m, s)| (m.clone(), cut(&s.sem, s.first_t))).collect();
        written.extend(emit_plot_data(&WideTable::new(t.clone(), mean)?, &out.join("otsd_norm"), "Normalized OTSD", "OTSD / bound", true)?);
        written.extend(emit_plot_data(&WideTable::new(t, sem)?, &out.join("otsd_norm_sem"), "", "", false)?);
        println!("method\tterminal_otsd_norm\tsem");
        for (m, s) in &agg {
            println!("{m}\t{:.6}\t{:.6}", s.terminal(), s.terminal_sem());
        }
    }

    let (measure, label) = match direction {
        RankDirection::Performance => (Measure::BestValue, "performance"),
        RankDirection::OeReversed => (Measure::Metric(MetricKind::Oe), "oe"),
    };
    let (first_t, scores) = analysis::problem_means(&traces, measure)?;
    let len = scores.values().flat_map(|row| row.values()).map(Vec::len).max().unwrap_or(0);
    let t: Vec<usize> = (first_t..first_t + len).collect();
    let table = analysis::mean_relative_ranking(&scores, &t, direction)?;
    let columns = table.methods.iter().cloned().zip(table.mean_rank.iter().cloned()).collect();
    written.extend(emit_plot_data(&WideTable::new(t, columns)?, &out.join(format!("rank_{label}")), &format!("Mean rank ({label})"), "mean rank", true)?);
    println!("method\tterminal_rank_{label}");
    for m in &table.methods {
        println!("{m}\t{:.3}", table.terminal(m).expect("method from the table"));
    }

    let meta = json!({
        "rank": label,
        "averaging": "seeds within each benchmark first, then benchmarks",
        "traces": traces.len(),
        "methods": table.methods,
        "problems": table.problems,
    });
    let meta_path = out.join("analysis.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("json value") + "\n").map_err(|e| Failure::input(e.to_string()))?;
    written.push(meta_path);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn report_bound(report: &analysis::BoundReport) -> Result<(), Failure> {
    print!("{}", report.table());
    let notices = report.notices();
    if notices > 0 {
        println!("{notices} run(s) reached normalized OTSD >= {}", analysis::BOUND_NOTICE);
    }
    if report.has_violation() {
        let bad: Vec<&str> = report.rows.iter().filter(|r| r.violation()).map(|r| r.label.as_str()).collect();
        return Err(Failure::violation(format!("normalized OTSD >= {} in: {}", analysis::BOUND_VIOLATION, bad.join(", "))));
    }
    Ok(())
}

/// Points are read without the unit-cube check so that escaped traces show up as violations.
pub fn verify_dir(dir: &Path) -> Result<(), Failure> {
    let sets = trace_paths(dir)?
        .par_iter()
        .map(|p| {
            let (meta, points) = harness::read_points_unchecked(p).map_err(|e| located(p, e))?;
            Ok((format!("{} {} seed {}", meta.benchmark, meta.method(), meta.seed), points))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    report_bound(&analysis::verify_point_sets(&sets)?)
}

pub fn verify_random(d: usize, t: usize, reps: usize, seed: u64) -> Result<(), Failure> {
    if d == 0 || t == 0 || reps == 0 {
        return Err(Failure::input("--random needs positive D, T and REPS"));
    }
    let traces = analysis::uniform_traces(d, t, reps, seed)?;
    report_bound(&analysis::verify_otsd_bound(&traces)?)
}

pub fn bench_oracle() -> Result<(), Failure> {
    let mut failed = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failed.push(name.to_string());
        }
    };

    let square = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]];
    let tour = *metrics::prefix_tour_lengths(&square)?.last().expect("nonempty");
    check("unit-square tour", (tour - 4.0).abs() < 1e-12, format!("heuristic {tour}, optimum 4"));

    let mut r = rng::stream(0, &[rng::label("bench-oracle")]);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.gen_range(4..=9);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| r.gen()).collect()).collect();
        let h = *metrics::prefix_tour_lengths(&pts)?.last().expect("nonempty");
        worst = worst.max(h / metrics::exact_tsp(&pts)?);
    }
    check("insertion within 2x optimum", worst <= 2.0, format!("100 instances in d=3, worst ratio {worst:.4}"));

    let psi = metrics::psi_bound(3, 1)?;
    check("tour bound d=3 t=1", (psi - 10.150_088).abs() < 1e-5, format!("{psi:.6}"));

    let uniform: Vec<Vec<f64>> = (0..2000).map(|_| (0..2).map(|_| r.gen()).collect()).collect();
    let h = metrics::oe(&uniform, metrics::neighbor_order(2000))?;
    check("uniform square entropy", h.abs() <= 0.1, format!("{h:.4}, exact 0"));

    let gauss: Vec<Vec<f64>> = (0..2000).map(|_| (0..2).map(|_| StandardNormal.sample(&mut r)).collect()).collect();
    let h = metrics::oe(&gauss, metrics::neighbor_order(2000))?;
    let exact = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    check("standard normal entropy", (h - exact).abs() <= 0.15, format!("{h:.4}, exact {exact:.4}"));

    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::violation(format!("oracle checks failed: {}", failed.join(", "))))
    }
}
