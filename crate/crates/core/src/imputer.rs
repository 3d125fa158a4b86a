//! The Hankel imputation pipeline: choose a lag, optionally split the series
//! into contiguous blocks, complete each block's block-Hankel embedding and
//! write the reconstruction into the missing cells.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::hankel::{dehankelize, hankelize};
use crate::svt::{complete, SolverConfig};
use crate::timeseries::TimeSeries;

/// Hankel embedding lag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lag {
    /// `ceil((n + 1) / (d + 1))` for each block's own length, giving a roughly square embedding.
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Lag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Lag::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Lag::Fixed(k)),
            _ => Err(Error::InvalidArgument(format!("lag must be 'auto' or a positive integer, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Lag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lag::Auto => f.write_str("auto"),
            Lag::Fixed(k) => write!(f, "{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HiConfig {
    pub lag: Lag,
    pub solver: SolverConfig,
    /// Target block length; `None` imputes the whole series as one block.
    pub block_size: Option<usize>,
    /// Divide each variable by its observed standard deviation before solving
    /// (and multiply back afterwards). `epsilon` is then in standardised units.
    pub standardize: bool,
}

/// Solver diagnostics for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagnostics {
    /// 0-based, half-open row range of the block.
    pub range: Range<usize>,
    pub lag: usize,
    pub iterations: usize,
    pub residual: f64,
    pub nuclear_norm: f64,
    pub rank_estimate: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ImputeResult {
    pub series: TimeSeries,
    pub per_block: Vec<BlockDiagnostics>,
    pub method: String,
}

impl ImputeResult {
    pub fn converged(&self) -> bool {
        self.per_block.iter().all(|b| b.converged)
    }
}

pub fn auto_lag(n: usize, d: usize) -> usize {
    (n + 1).div_ceil(d + 1).clamp(1, n.max(1))
}

/// Partitions `0..n` into `ceil(n / b)` contiguous ranges whose lengths differ by at most one.
pub fn split_blocks(n: usize, block_size: usize) -> Result<Vec<Range<usize>>> {
    if block_size == 0 || block_size > n {
        return Err(Error::InvalidArgument(format!(
            "block size {block_size} outside [1, {n}]"
        )));
    }
    let count = n.div_ceil(block_size);
    let base = n / count;
    let longer = n % count;
    let mut start = 0;
    Ok((0..count)
        .map(|i| {
            let len = base + usize::from(i < longer);
            let r = start..start + len;
            start += len;
            r
        })
        .collect())
}

/// Imputes every missing cell of `series`. Observed cells are copied unchanged.
pub fn impute_hi(series: &TimeSeries, config: &HiConfig) -> Result<ImputeResult> {
    config.solver.validate()?;
    let (n, d) = series.shape();
    let ranges = match config.block_size {
        Some(b) => split_blocks(n, b)?,
        None => std::iter::once(0..n).collect(),
    };
    if let Lag::Fixed(k) = config.lag {
        let shortest = ranges.iter().map(|r| r.len()).min().unwrap_or(n);
        if k == 0 || k > shortest {
            return Err(Error::InvalidArgument(format!(
                "lag {k} outside [1, {shortest}] (block length)"
            )));
        }
    }
    let scales: Vec<f64> = if config.standardize {
        (0..d).map(|v| observed_std(series, v)).collect()
    } else {
        vec![1.0; d]
    };

    let mut filled: Vec<f64> = (0..d)
        .flat_map(|v| series.column(v).iter().copied())
        .collect();
    let mut per_block = Vec::with_capacity(ranges.len());
    for range in ranges {
        let block = series.slice(range.clone())?;
        for v in 0..d {
            if block.mask().column(v).iter().all(|o| !*o) {
                return Err(Error::InsufficientObservations { block: range, variable: v + 1 });
            }
        }
        let block = if config.standardize { rescale(&block, &scales, false)? } else { block };
        let lag = match config.lag {
            Lag::Auto => auto_lag(block.len(), d),
            Lag::Fixed(k) => k,
        };
        let embedding = hankelize(&block, lag)?;
        let solved = complete(embedding.matrix(), &config.solver)?;
        let mut recon = dehankelize(solved.matrix.as_ref(), &embedding)?;
        if config.standardize {
            recon = rescale(&recon, &scales, true)?;
        }
        for v in 0..d {
            for (offset, t) in range.clone().enumerate() {
                if !series.is_observed(t, v) {
                    filled[v * n + t] = recon.value(offset, v);
                }
            }
        }
        per_block.push(BlockDiagnostics {
            range,
            lag,
            iterations: solved.iterations,
            residual: solved.residual,
            nuclear_norm: solved.nuclear_norm,
            rank_estimate: solved.rank_estimate,
            converged: solved.converged,
        });
    }

    let series = TimeSeries::from_parts(filled, crate::timeseries::Mask::all_observed(n, d))?;
    Ok(ImputeResult {
        series,
        per_block,
        method: "hi".into(),
    })
}

fn observed_std(series: &TimeSeries, v: usize) -> f64 {
    let obs: Vec<f64> = (0..series.len()).filter_map(|t| series.get(t, v)).collect();
    if obs.len() < 2 {
        return 1.0;
    }
    let mean = obs.iter().sum::<f64>() / obs.len() as f64;
    let var = obs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (obs.len() - 1) as f64;
    let sd = var.sqrt();
    if sd > 0.0 && sd.is_finite() {
        sd
    } else {
        1.0
    }
}

fn rescale(series: &TimeSeries, scales: &[f64], undo: bool) -> Result<TimeSeries> {
    let columns = (0..series.dim())
        .map(|v| {
            (0..series.len())
                .map(|t| series.get(t, v).map(|x| if undo { x * scales[v] } else { x / scales[v] }))
                .collect()
        })
        .collect();
    TimeSeries::from_options(columns)
}
