//! `hi`: generate, degrade, impute, score and benchmark gappy time-series.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or precondition error,
//! 3 solver non-convergence (`impute` only; sweeps record it per row).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hi_core::{Lag, Method};

#[derive(Parser, Debug)]
#[command(name = "hi", version, about = "Hankel imputation of gappy time-series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a benchmark series.
    Generate(GenerateArgs),
    /// Remove nested uniform random cells at each missingness level.
    Degrade(DegradeArgs),
    /// Fill the missing cells of a series.
    Impute(ImputeArgs),
    /// Trend and noise scores of an imputation against the truth.
    Score(ScoreArgs),
    /// Degrade/impute/score trials for every method and level.
    Bench(BenchArgs),
    /// HI trials over a list of lags.
    LagSweep(LagSweepArgs),
    /// HI trials over a list of block sizes.
    BlockSweep(BlockSweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Var1,
    Ar3,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Var1 => "var1",
            Model::Ar3 => "ar3",
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DegradeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Missingness percentages.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70")]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct HiArgs {
    /// Hankel lag: `auto` or a window length.
    #[arg(long, default_value = "auto")]
    lag: Lag,
    /// Absolute Frobenius tolerance on the observed entries.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Block length; 0 keeps the series in one block.
    #[arg(long, default_value_t = 0)]
    block_size: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Divide each variable by its observed standard deviation before solving.
    #[arg(long)]
    standardize: bool,
}

#[derive(Args, Debug)]
struct ImputeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "hi")]
    method: Method,
    #[command(flatten)]
    hi: HiArgs,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    imputed: PathBuf,
    /// Mask CSV; cells marked 0 are scored.
    #[arg(long)]
    mask: PathBuf,
    /// Moving-average half-width.
    #[arg(long, default_value_t = 7)]
    radius: usize,
    /// Label for the `method` column.
    #[arg(long, default_value = "unknown")]
    method: String,
    /// Label for the `level` column; defaults to the mask's missing percentage.
    #[arg(long)]
    level: Option<f64>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// `var1`, `ar3`, or the path of a complete series CSV.
    #[arg(long, default_value = "ar3")]
    dataset: String,
    /// Length of a generated dataset.
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Seed of a generated dataset (defaults to --seed).
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Moving-average half-width for scoring (default: 3 for ar3, 7 otherwise).
    #[arg(long)]
    radius: Option<usize>,
    /// Base seed for the missingness masks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Leave wall_time_s empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70")]
    levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "hi,linear,spline,stine,kalman,ewma")]
    methods: Vec<Method>,
    #[command(flatten)]
    hi: HiArgs,
}

#[derive(Args, Debug)]
struct LagSweepArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_delimiter = ',', default_value = "40")]
    levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    lags: Vec<Lag>,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

#[derive(Args, Debug)]
struct BlockSweepArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_delimiter = ',', default_value = "40")]
    levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    block_sizes: Vec<usize>,
    #[arg(long, default_value = "auto")]
    lag: Lag,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
