//! Trend and noise scores for an imputation.
//!
//! Each series is split into a moving-average trend and a noise remainder.
//! Over the `m` imputed cells:
//!
//! ```text
//! T = sqrt(1/m sum (trend_truth - trend_imputed)^2)
//! E = | sqrt(1/m sum noise_truth^2) - sqrt(1/m sum noise_imputed^2) |
//! ```
//!
//! Multivariate scores average the per-variable scores, each variable scored
//! over its own imputed cells.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::timeseries::{Mask, TimeSeries};

/// Moving-average half-width; the window is `2 radius + 1` points, truncated at the ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothConfig {
    pub radius: usize,
}

impl SmoothConfig {
    pub const fn new(radius: usize) -> Self {
        Self { radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePair {
    pub trend_score: f64,
    pub noise_score: f64,
    /// Number of scored cells.
    pub n_missing: usize,
}

/// Splits a complete univariate series into (trend, noise).
pub fn decompose(series: &[f64], config: SmoothConfig) -> (Vec<f64>, Vec<f64>) {
    let n = series.len();
    let trend: Vec<f64> = (0..n)
        .map(|t| {
            let lo = t.saturating_sub(config.radius);
            let hi = (t + config.radius).min(n - 1);
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let noise = series.iter().zip(&trend).map(|(x, m)| x - m).collect();
    (trend, noise)
}

/// Scores `imputed` against `truth` over the cells that `gaps` marks missing.
///
/// Both series must be complete and must agree exactly wherever `gaps` is observed.
pub fn score(truth: &TimeSeries, imputed: &TimeSeries, gaps: &Mask, config: SmoothConfig) -> Result<ScorePair> {
    if truth.shape() != imputed.shape() {
        return Err(Error::ShapeMismatch {
            expected: truth.shape(),
            found: imputed.shape(),
        });
    }
    if truth.shape() != gaps.shape() {
        return Err(Error::ShapeMismatch {
            expected: truth.shape(),
            found: gaps.shape(),
        });
    }
    if !truth.is_complete() || !imputed.is_complete() {
        return Err(Error::Scoring("truth and imputed series must be complete".into()));
    }
    let (n, d) = truth.shape();
    let total = gaps.missing_count();
    if total == 0 {
        return Err(Error::Scoring("no missing cells to score".into()));
    }

    let (mut t_sum, mut e_sum, mut scored_vars) = (0.0, 0.0, 0usize);
    for v in 0..d {
        let x = truth.column(v);
        let y = imputed.column(v);
        for t in 0..n {
            if gaps.is_observed(t, v) && x[t].to_bits() != y[t].to_bits() {
                return Err(Error::Scoring(format!(
                    "imputed differs from truth at observed cell (t={}, v={})",
                    t + 1,
                    v + 1
                )));
            }
        }
        let missing: Vec<usize> = (0..n).filter(|t| gaps.is_missing(*t, v)).collect();
        if missing.is_empty() {
            continue;
        }
        let (xt, xe) = decompose(x, config);
        let (yt, ye) = decompose(y, config);
        let m = missing.len() as f64;
        let trend = (missing.iter().map(|&t| (xt[t] - yt[t]).powi(2)).sum::<f64>() / m).sqrt();
        let rms_x = (missing.iter().map(|&t| xe[t] * xe[t]).sum::<f64>() / m).sqrt();
        let rms_y = (missing.iter().map(|&t| ye[t] * ye[t]).sum::<f64>() / m).sqrt();
        t_sum += trend;
        e_sum += (rms_x - rms_y).abs();
        scored_vars += 1;
    }
    Ok(ScorePair {
        trend_score: t_sum / scored_vars as f64,
        noise_score: e_sum / scored_vars as f64,
        n_missing: total,
    })
}

/// Sample mean and the half-width of its 95% Student-t confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub half_width: f64,
}

impl MeanCi {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub trend: MeanCi,
    pub noise: MeanCi,
    pub trials: usize,
}

/// Mean and 95% CI of a sample of at least two values.
pub fn mean_ci(values: &[f64]) -> Result<MeanCi> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {n}")));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let quantile = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(MeanCi {
        mean,
        half_width: quantile * var.sqrt() / (n as f64).sqrt(),
    })
}

pub fn aggregate(scores: &[ScorePair]) -> Result<Aggregate> {
    let trend: Vec<f64> = scores.iter().map(|s| s.trend_score).collect();
    let noise: Vec<f64> = scores.iter().map(|s| s.noise_score).collect();
    Ok(Aggregate {
        trend: mean_ci(&trend)?,
        noise: mean_ci(&noise)?,
        trials: scores.len(),
    })
}
