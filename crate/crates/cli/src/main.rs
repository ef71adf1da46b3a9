//! `dbmatch`: command-line front end for dbmatch-core.
//!
//! Exit codes: 0 on success, 1 on invalid input or arguments, 2 when an
//! enumeration or size guard is exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dbmatch_core::Error;

/// Environment variable overriding the worker thread count.
const THREADS_VAR: &str = "DBMATCH_THREADS";

#[derive(Parser)]
#[command(
    name = "dbmatch",
    version,
    about = "Detect dependence between two row-shuffled databases",
    after_help = "Set DBMATCH_THREADS to fix the worker thread count (default: available parallelism). \
                  Results do not depend on it."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model or plan file and report the first violated invariant.
    Validate(ValidateArgs),
    /// Draw a database pair under H0 or H1 and write it as CSV.
    Sample(SampleArgs),
    /// Run detectors on a database pair read from CSV.
    Detect(DetectArgs),
    /// Estimate detector risks by Monte-Carlo simulation.
    Risk(RiskArgs),
    /// Estimate risks over the grid in a plan's [sweep] section.
    Sweep(SweepArgs),
    /// Report spectral, second-moment and exponent bounds as JSON.
    Bounds(BoundsArgs),
    /// Tabulate the Chernoff exponents E_Q and E_P over a threshold grid.
    Chernoff(ChernoffArgs),
    /// Exact total variation and Bayes risk of a tiny discrete instance.
    #[command(name = "tv-oracle")]
    TvOracle(TvArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Hypothesis {
    H0,
    H1,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectorArgs {
    /// Detector to run: glrt, sum, count or np. Repeatable.
    #[arg(long = "detector", value_name = "KIND")]
    detectors: Vec<String>,
    /// Threshold for glrt (default 0) and sum (default d·n·SKL).
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Count-test threshold: a number or 'min-bound'.
    #[arg(long, value_name = "VALUE", allow_negative_numbers = true)]
    tau_count: Option<String>,
    /// How P_d is computed: auto, exact, monte-carlo or monte-carlo:<samples>.
    #[arg(long, value_name = "METHOD", default_value = "auto")]
    pd_method: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ValidateSource {
    /// Model file.
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Plan file.
    #[arg(long, value_name = "PATH")]
    plan: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: ValidateSource,
}

#[derive(Args)]
struct SampleArgs {
    /// Model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Number of rows.
    #[arg(long)]
    n: usize,
    /// Number of features per row.
    #[arg(long)]
    d: usize,
    /// Seed for the random stream.
    #[arg(long)]
    seed: u64,
    /// Hypothesis to sample from.
    #[arg(long, value_enum)]
    hypothesis: Hypothesis,
    /// Output directory; receives x.csv, y.csv and (for h1) sigma.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// CSV matrix X.
    #[arg(long, value_name = "PATH")]
    x: PathBuf,
    /// CSV matrix Y.
    #[arg(long, value_name = "PATH")]
    y: PathBuf,
    /// Seed for Monte-Carlo P_d estimates.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    detectors: DetectorArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RiskArgs {
    /// Plan file (alternative to --model with --n, --d and --detector).
    #[arg(long, value_name = "PATH", conflicts_with_all = ["model", "n", "d"])]
    plan: Option<PathBuf>,
    /// Model file.
    #[arg(long, value_name = "PATH", required_unless_present = "plan")]
    model: Option<PathBuf>,
    /// Number of rows.
    #[arg(long, required_unless_present = "plan")]
    n: Option<usize>,
    /// Number of features per row.
    #[arg(long, required_unless_present = "plan")]
    d: Option<usize>,
    /// Seed; overrides the plan's.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per hypothesis; overrides the plan's (default 2000).
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    detectors: DetectorArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Plan file with a [sweep] section.
    #[arg(long, value_name = "PATH")]
    plan: PathBuf,
    /// Seed; overrides the plan's.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per hypothesis; overrides the plan's.
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundsArgs {
    /// Model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Number of rows.
    #[arg(long)]
    n: usize,
    /// Number of features per row.
    #[arg(long)]
    d: usize,
    /// GLRT threshold for the exponent conditions.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
    /// Count-test threshold for the exponent bounds.
    #[arg(long, allow_negative_numbers = true)]
    tau_count: Option<f64>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChernoffArgs {
    /// Model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Number of evenly spaced thresholds across [−KL(Q‖P), KL(P‖Q)].
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TvArgs {
    /// Discrete or Bernoulli model file.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Number of rows.
    #[arg(long)]
    n: usize,
    /// Number of features per row.
    #[arg(long)]
    d: usize,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::Validation(format!(
            "{THREADS_VAR} must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Invariant(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Detect(a) => commands::detect(&a),
        Command::Risk(a) => commands::risk(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Bounds(a) => commands::bounds(&a),
        Command::Chernoff(a) => commands::chernoff(&a),
        Command::TvOracle(a) => commands::tv_oracle(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_capacity() { 2 } else { 1 })
        }
    }
}
