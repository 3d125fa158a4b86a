//! Benchmark sweeps: repeated degrade/impute/score trials over missingness
//! levels, methods, lags or block sizes, written as long-format and
//! aggregated CSV.
//!
//! Trial `i` draws one nested missingness plan from `split_seed(base, i)`, so
//! within a trial the cells missing at a lower level are also missing at every
//! higher level, and no two trials share an RNG stream. Trials may run in
//! parallel; rows are always emitted in (level, trial, variant, method) order.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{impute_baseline, BaselineMethod};
use crate::error::{Error, Result};
use crate::imputer::{auto_lag, impute_hi, split_blocks, HiConfig, Lag};
use crate::scoring::{mean_ci, score, ScorePair, SmoothConfig};
use crate::synthetic::{degrade, generate_ar, generate_var1, ArModel, VarModel};
use crate::timeseries::TimeSeries;

/// An imputation method by name: `hi` or one of the baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hi,
    Baseline(BaselineMethod),
}

impl Method {
    pub fn all() -> Vec<Method> {
        std::iter::once(Method::Hi)
            .chain(BaselineMethod::ALL.into_iter().map(Method::Baseline))
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Hi => "hi",
            Method::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("hi") {
            return Ok(Method::Hi);
        }
        s.parse::<BaselineMethod>()
            .map(Method::Baseline)
            .map_err(|_| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

/// Result of running one method on one gappy series.
#[derive(Debug, Clone)]
pub struct Imputation {
    pub series: TimeSeries,
    pub converged: bool,
}

pub fn run_method(method: Method, gappy: &TimeSeries, hi: &HiConfig) -> Result<Imputation> {
    match method {
        Method::Hi => impute_hi(gappy, hi).map(|r| Imputation {
            converged: r.converged(),
            series: r.series,
        }),
        Method::Baseline(b) => impute_baseline(gappy, b).map(|series| Imputation {
            series,
            converged: true,
        }),
    }
}

/// Derives an independent seed for stream `index` of `base` (SplitMix64 finaliser).
pub fn split_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A complete ground-truth series with its scoring defaults.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub truth: TimeSeries,
    pub default_radius: usize,
}

impl Dataset {
    /// `var1` or `ar3`, simulated with the benchmark parameters.
    pub fn generated(model: &str, n: usize, seed: u64) -> Result<Self> {
        let (truth, default_radius) = match model {
            "var1" => (generate_var1(&VarModel::benchmark_var1(), n, seed)?, 7),
            "ar3" => (generate_ar(&ArModel::benchmark_ar3(), n, seed)?, 3),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown model {other:?} (expected var1 or ar3)"
                )))
            }
        };
        Ok(Self {
            name: model.to_string(),
            truth,
            default_radius,
        })
    }

    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let truth = TimeSeries::read_csv(path)?;
        if !truth.is_complete() {
            return Err(Error::InvalidArgument(format!(
                "{}: benchmark truth must be complete",
                path.display()
            )));
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "csv".into());
        Ok(Self {
            name,
            truth,
            default_radius: 7,
        })
    }
}

/// What varies across the rows of a sweep besides level and trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    /// Every method in [`BenchSpec::methods`].
    Methods,
    /// HI at each lag.
    Lags(Vec<Lag>),
    /// HI at each block size.
    BlockSizes(Vec<usize>),
}

impl Axis {
    fn column(&self) -> Option<&'static str> {
        match self {
            Axis::Methods => None,
            Axis::Lags(_) => Some("lag"),
            Axis::BlockSizes(_) => Some("block_size"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub dataset: Dataset,
    /// Missingness percentages, each in (0, 100).
    pub levels: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub hi: HiConfig,
    pub smooth: SmoothConfig,
    pub base_seed: u64,
    /// Record wall-clock time per trial. Off makes every output byte-reproducible.
    pub timing: bool,
}

impl BenchSpec {
    pub fn new(dataset: Dataset) -> Self {
        let smooth = SmoothConfig::new(dataset.default_radius);
        Self {
            dataset,
            levels: crate::synthetic::default_levels(),
            trials: 10,
            methods: Method::all(),
            hi: HiConfig::default(),
            smooth,
            base_seed: 0,
            timing: true,
        }
    }

    pub fn validate(&self, axis: &Axis) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.levels.is_empty() {
            return bad("at least one missingness level is required".into());
        }
        if let Some(l) = self.levels.iter().find(|l| !(**l > 0.0 && **l < 100.0)) {
            return bad(format!("level {l} outside (0, 100)"));
        }
        if matches!(axis, Axis::Methods) && self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if !self.dataset.truth.is_complete() {
            return bad("benchmark truth must be complete".into());
        }
        let n = self.dataset.truth.len();
        match axis {
            Axis::Methods => {}
            Axis::Lags(lags) => {
                if lags.is_empty() {
                    return bad("at least one lag is required".into());
                }
                if let Some(Lag::Fixed(k)) = lags.iter().find(|l| matches!(l, Lag::Fixed(k) if *k == 0 || *k > n)) {
                    return bad(format!("lag {k} outside [1, {n}]"));
                }
            }
            Axis::BlockSizes(sizes) => {
                if sizes.is_empty() {
                    return bad("at least one block size is required".into());
                }
                for &b in sizes {
                    split_blocks(n, b)?;
                }
            }
        }
        self.hi.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    NonConverged,
    Failed(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::NonConverged => f.write_str("nonconverged"),
            Status::Failed(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub dataset: String,
    pub method: Method,
    pub level: f64,
    pub trial: usize,
    /// Resolved lag or block size for lag/block sweeps.
    pub variant: Option<usize>,
    pub scores: Option<ScorePair>,
    pub wall_time_s: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: Axis,
    pub rows: Vec<TrialRow>,
}

/// Per (level, variant, method) summary over the scored trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub dataset: String,
    pub method: Method,
    pub level: f64,
    pub variant: Option<usize>,
    /// Trials with scores (converged or not).
    pub trials: usize,
    pub failed: usize,
    pub trend_mean: Option<f64>,
    pub trend_ci95: Option<f64>,
    pub noise_mean: Option<f64>,
    pub noise_ci95: Option<f64>,
    pub wall_time_mean_s: Option<f64>,
}

struct Variant {
    method: Method,
    label: Option<usize>,
    hi: HiConfig,
}

fn variants(spec: &BenchSpec, axis: &Axis) -> Vec<Variant> {
    let (n, d) = spec.dataset.truth.shape();
    match axis {
        Axis::Methods => spec
            .methods
            .iter()
            .map(|&method| Variant { method, label: None, hi: spec.hi.clone() })
            .collect(),
        Axis::Lags(lags) => lags
            .iter()
            .map(|&lag| {
                let k = match lag {
                    Lag::Auto => auto_lag(n, d),
                    Lag::Fixed(k) => k,
                };
                Variant {
                    method: Method::Hi,
                    label: Some(k),
                    hi: HiConfig { lag: Lag::Fixed(k), block_size: None, ..spec.hi.clone() },
                }
            })
            .collect(),
        Axis::BlockSizes(sizes) => sizes
            .iter()
            .map(|&b| Variant {
                method: Method::Hi,
                label: Some(b),
                hi: HiConfig { block_size: (b < n).then_some(b), ..spec.hi.clone() },
            })
            .collect(),
    }
}

/// Runs every (level, trial, variant) combination. Individual failures are
/// recorded in the rows; only an invalid spec is an error.
pub fn run(spec: &BenchSpec, axis: Axis) -> Result<SweepResult> {
    spec.validate(&axis)?;
    let truth = &spec.dataset.truth;
    let variants = variants(spec, &axis);

    let per_trial: Vec<Vec<TrialRow>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = split_seed(spec.base_seed, trial as u64);
            let plan = degrade(truth.shape(), &spec.levels, seed).expect("levels validated");
            let mut rows = Vec::with_capacity(spec.levels.len() * variants.len());
            for (li, &level) in spec.levels.iter().enumerate() {
                let gaps = &plan.masks[li];
                let gappy = plan.apply(truth, li).expect("plan shape matches truth");
                for v in &variants {
                    let start = Instant::now();
                    let outcome = run_method(v.method, &gappy, &v.hi);
                    let elapsed = start.elapsed().as_secs_f64();
                    let (scores, status) = match outcome.and_then(|imp| {
                        score(truth, &imp.series, gaps, spec.smooth).map(|s| (s, imp.converged))
                    }) {
                        Ok((s, true)) => (Some(s), Status::Ok),
                        Ok((s, false)) => (Some(s), Status::NonConverged),
                        Err(e) => (None, Status::Failed(e.to_string())),
                    };
                    rows.push(TrialRow {
                        dataset: spec.dataset.name.clone(),
                        method: v.method,
                        level,
                        trial,
                        variant: v.label,
                        scores,
                        wall_time_s: spec.timing.then_some(elapsed),
                        status,
                    });
                }
            }
            rows
        })
        .collect();

    let mut rows: Vec<TrialRow> = per_trial.into_iter().flatten().collect();
    let level_rank = |l: f64| spec.levels.iter().position(|x| *x == l).unwrap_or(usize::MAX);
    // Stable sort keeps variant/method order within a (level, trial).
    rows.sort_by_key(|r| (level_rank(r.level), r.trial));
    Ok(SweepResult { axis, rows })
}

impl SweepResult {
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut groups: Vec<AggregateRow> = Vec::new();
        let mut members: Vec<Vec<&TrialRow>> = Vec::new();
        for row in &self.rows {
            let key = |g: &AggregateRow| g.method == row.method && g.level == row.level && g.variant == row.variant;
            let idx = match groups.iter().position(key) {
                Some(i) => i,
                None => {
                    groups.push(AggregateRow {
                        dataset: row.dataset.clone(),
                        method: row.method,
                        level: row.level,
                        variant: row.variant,
                        trials: 0,
                        failed: 0,
                        trend_mean: None,
                        trend_ci95: None,
                        noise_mean: None,
                        noise_ci95: None,
                        wall_time_mean_s: None,
                    });
                    members.push(Vec::new());
                    groups.len() - 1
                }
            };
            members[idx].push(row);
        }
        for (g, rows) in groups.iter_mut().zip(members) {
            let scored: Vec<ScorePair> = rows.iter().filter_map(|r| r.scores).collect();
            g.trials = scored.len();
            g.failed = rows.len() - scored.len();
            if !scored.is_empty() {
                let m = scored.len() as f64;
                g.trend_mean = Some(scored.iter().map(|s| s.trend_score).sum::<f64>() / m);
                g.noise_mean = Some(scored.iter().map(|s| s.noise_score).sum::<f64>() / m);
            }
            if scored.len() >= 2 {
                let trend: Vec<f64> = scored.iter().map(|s| s.trend_score).collect();
                let noise: Vec<f64> = scored.iter().map(|s| s.noise_score).collect();
                g.trend_ci95 = mean_ci(&trend).ok().map(|c| c.half_width);
                g.noise_ci95 = mean_ci(&noise).ok().map(|c| c.half_width);
            }
            let times: Vec<f64> = rows.iter().filter_map(|r| r.wall_time_s).collect();
            if !times.is_empty() {
                g.wall_time_mean_s = Some(times.iter().sum::<f64>() / times.len() as f64);
            }
        }
        groups
    }

    /// Long format: one row per (level, trial, variant, method).
    pub fn write_long_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["dataset", "method", "level", "trial"];
        header.extend(self.axis.column());
        header.extend(["trend_score", "noise_score", "wall_time_s", "status"]);
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.dataset.clone(), r.method.to_string(), num(r.level), r.trial.to_string()];
            if self.axis.column().is_some() {
                rec.push(r.variant.map(|v| v.to_string()).unwrap_or_default());
            }
            rec.push(opt(r.scores.map(|s| s.trend_score)));
            rec.push(opt(r.scores.map(|s| s.noise_score)));
            rec.push(opt(r.wall_time_s));
            rec.push(r.status.to_string());
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_aggregate_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["dataset", "method", "level"];
        header.extend(self.axis.column());
        header.extend([
            "trials",
            "failed",
            "trend_mean",
            "trend_ci95",
            "noise_mean",
            "noise_ci95",
            "wall_time_mean_s",
        ]);
        out.write_record(&header)?;
        for g in self.aggregate() {
            let mut rec = vec![g.dataset.clone(), g.method.to_string(), num(g.level)];
            if self.axis.column().is_some() {
                rec.push(g.variant.map(|v| v.to_string()).unwrap_or_default());
            }
            rec.extend([
                g.trials.to_string(),
                g.failed.to_string(),
                opt(g.trend_mean),
                opt(g.trend_ci95),
                opt(g.noise_mean),
                opt(g.noise_ci95),
                opt(g.wall_time_mean_s),
            ]);
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
