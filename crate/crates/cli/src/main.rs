use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod failure;

use failure::Failure;

#[derive(Parser)]
#[command(name = "boexplore", version, about = "Measure and compare how black-box optimizers explore")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every benchmark x acquisition x seed of a TOML config and write JSONL traces.
    Run(RunArgs),
    /// Per-iteration OTSD, normalized OTSD or OE of trace files as CSV.
    Metrics(MetricsArgs),
    /// Aggregate a directory of traces and rank the methods per problem.
    Analyze(AnalyzeArgs),
    /// Check that normalized OTSD stays below the tour bound.
    VerifyBound(VerifyBoundArgs),
    /// Run the brute-force tour and closed-form entropy oracles on small fixtures.
    BenchOracle,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory, overriding `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(required = true)]
    traces: Vec<PathBuf>,
    #[arg(long, default_value = "otsd", value_parser = ["otsd", "otsd-norm", "oe"])]
    kind: String,
    /// A `.csv` file for a single trace, otherwise a directory; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    trace_dir: PathBuf,
    #[arg(long, default_value = "performance", value_parser = ["performance", "oe"])]
    rank: String,
    #[arg(long, default_value = "analysis")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyBoundArgs {
    /// Directory of JSONL traces.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    trace_dir: Option<PathBuf>,
    /// Uniform random traces instead: dimension, length, repetitions.
    #[arg(long, num_args = 3, value_names = ["D", "T", "REPS"])]
    random: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(a) => commands::run(&a.config, a.workers, a.out.as_deref()),
        Command::Metrics(a) => commands::metrics(&a.traces, a.kind.parse()?, a.out.as_deref()),
        Command::Analyze(a) => commands::analyze(&a.trace_dir, a.rank.parse()?, &a.out),
        Command::VerifyBound(a) => match a.random {
            Some(r) => commands::verify_random(r[0], r[1], r[2], a.seed),
            None => commands::verify_dir(&a.trace_dir.expect("clap requires a source")),
        },
        Command::BenchOracle => commands::bench_oracle(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { failure::INPUT } else { failure::OK });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::from(failure::OK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
