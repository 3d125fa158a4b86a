use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use hi_core::sweep::{self, Axis, BenchSpec, Dataset, Method};
use hi_core::{
    degrade, generate_ar, generate_var1, impute_baseline, impute_hi, score, ArModel, Error, HiConfig, Mask, SmoothConfig, SolverConfig,
    TimeSeries, VarModel,
};

use crate::{
    BenchArgs, BlockSweepArgs, Command, DegradeArgs, GenerateArgs, HiArgs, ImputeArgs, LagSweepArgs, ScoreArgs,
    SweepArgs,
};

pub struct CliError {
    pub code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::InvalidArgument(_)) { 1 } else { 2 };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T = u8> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Generate(a) => generate(a),
        Command::Degrade(a) => degrade_cmd(a),
        Command::Impute(a) => impute(a),
        Command::Score(a) => score_cmd(a),
        Command::Bench(a) => bench(a),
        Command::LagSweep(a) => lag_sweep(a),
        Command::BlockSweep(a) => block_sweep(a),
    }
}

fn generate(a: GenerateArgs) -> CliResult {
    let series = match a.model {
        crate::Model::Var1 => generate_var1(&VarModel::benchmark_var1(), a.n, a.seed)?,
        crate::Model::Ar3 => generate_ar(&ArModel::benchmark_ar3(), a.n, a.seed)?,
    };
    series.write_csv(&a.out)?;
    eprintln!("wrote {} ({} x {}, model {})", a.out.display(), a.n, series.dim(), a.model.name());
    Ok(0)
}

fn degrade_cmd(a: DegradeArgs) -> CliResult {
    let series = TimeSeries::read_csv(&a.input)?;
    let plan = degrade(series.shape(), &a.levels, a.seed)?;
    fs::create_dir_all(&a.out_dir)?;
    for (i, level) in plan.levels.iter().enumerate() {
        let mask = &plan.masks[i];
        // Cells already missing in the input stay missing.
        let gappy = series.with_mask(&mask.intersect(series.mask())?)?;
        mask.write_csv(a.out_dir.join(format!("mask_{level}.csv")))?;
        gappy.write_csv(a.out_dir.join(format!("series_{level}.csv")))?;
        eprintln!("level {level}%: {} cells removed", mask.missing_count());
    }
    Ok(0)
}

fn hi_config(h: &HiArgs) -> HiConfig {
    HiConfig {
        lag: h.lag,
        solver: SolverConfig { max_iters: h.max_iters, ..SolverConfig::with_epsilon(h.eps) },
        block_size: (h.block_size > 0).then_some(h.block_size),
        standardize: h.standardize,
    }
}

fn impute(a: ImputeArgs) -> CliResult {
    let series = TimeSeries::read_csv(&a.input)?;
    let config = hi_config(&a.hi);
    config.solver.validate()?;
    if let Some(b) = config.block_size {
        if b > series.len() {
            return Err(CliError::usage(format!("block size {b} exceeds series length {}", series.len())));
        }
    }
    let start = Instant::now();
    let (imputed, converged) = match a.method {
        Method::Hi => {
            let report = impute_hi(&series, &config)?;
            for b in &report.per_block {
                eprintln!(
                    "block [{}..{}]: lag {}, {} iterations, residual {:.3e}, rank {}{}",
                    b.range.start + 1,
                    b.range.end,
                    b.lag,
                    b.iterations,
                    b.residual,
                    b.rank_estimate,
                    if b.converged { "" } else { " (not converged)" }
                );
            }
            let converged = report.converged();
            (report.series, converged)
        }
        Method::Baseline(m) => (impute_baseline(&series, m)?, true),
    };
    eprintln!("method {}: {:.3} s", a.method, start.elapsed().as_secs_f64());
    imputed.write_csv(&a.out)?;
    if !converged {
        eprintln!(
            "warning: solver did not reach eps {} within {} iterations; output written anyway",
            a.hi.eps, a.hi.max_iters
        );
        return Ok(3);
    }
    Ok(0)
}

fn score_cmd(a: ScoreArgs) -> CliResult {
    let truth = TimeSeries::read_csv(&a.truth)?;
    let imputed = TimeSeries::read_csv(&a.imputed)?;
    let mask = Mask::read_csv(&a.mask)?;
    let s = score(&truth, &imputed, &mask, SmoothConfig::new(a.radius))?;
    let level = a
        .level
        .unwrap_or_else(|| 100.0 * mask.missing_count() as f64 / (mask.len() * mask.dim()) as f64);
    let mut out: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "method,level,trend_score,noise_score")?;
    writeln!(out, "{},{},{},{}", a.method, level, s.trend_score, s.noise_score)?;
    out.flush()?;
    Ok(0)
}

fn spec_for(s: &SweepArgs, levels: Vec<f64>) -> CliResult<BenchSpec> {
    let dataset = match s.dataset.as_str() {
        "var1" | "ar3" => Dataset::generated(&s.dataset, s.n, s.data_seed.unwrap_or(s.seed))?,
        path => {
            if !Path::new(path).exists() {
                return Err(Error::Io(io::Error::new(io::ErrorKind::NotFound, format!("{path}: no such file"))).into());
            }
            Dataset::from_csv(path)?
        }
    };
    let mut spec = BenchSpec::new(dataset);
    spec.levels = levels;
    spec.trials = s.trials;
    spec.base_seed = s.seed;
    spec.timing = !s.no_timing;
    if let Some(r) = s.radius {
        spec.smooth = SmoothConfig::new(r);
    }
    Ok(spec)
}

fn write_results(result: &sweep::SweepResult, s: &SweepArgs) -> CliResult {
    fs::create_dir_all(&s.out_dir)?;
    let long = s.out_dir.join("results.csv");
    let agg = s.out_dir.join("aggregate.csv");
    result.write_long_csv(BufWriter::new(File::create(&long)?))?;
    result.write_aggregate_csv(BufWriter::new(File::create(&agg)?))?;
    let failed = result.rows.iter().filter(|r| r.scores.is_none()).count();
    let nonconverged = result.rows.iter().filter(|r| r.status == sweep::Status::NonConverged).count();
    eprintln!(
        "{} rows ({} failed, {} not converged) -> {}, {}",
        result.rows.len(),
        failed,
        nonconverged,
        long.display(),
        agg.display()
    );
    Ok(0)
}

fn bench(a: BenchArgs) -> CliResult {
    let mut spec = spec_for(&a.sweep, a.levels)?;
    spec.methods = a.methods;
    spec.hi = hi_config(&a.hi);
    let result = sweep::run(&spec, Axis::Methods)?;
    write_results(&result, &a.sweep)
}

fn lag_sweep(a: LagSweepArgs) -> CliResult {
    let mut spec = spec_for(&a.sweep, a.levels)?;
    spec.hi.solver = SolverConfig { max_iters: a.max_iters, ..SolverConfig::with_epsilon(a.eps) };
    let result = sweep::run(&spec, Axis::Lags(a.lags))?;
    write_results(&result, &a.sweep)
}

fn block_sweep(a: BlockSweepArgs) -> CliResult {
    let mut spec = spec_for(&a.sweep, a.levels)?;
    spec.hi.lag = a.lag;
    spec.hi.solver = SolverConfig { max_iters: a.max_iters, ..SolverConfig::with_epsilon(a.eps) };
    let result = sweep::run(&spec, Axis::BlockSizes(a.block_sizes))?;
    write_results(&result, &a.sweep)
}
