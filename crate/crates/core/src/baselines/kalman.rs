//! Local-level structural model with Kalman smoothing.
//!
//! ```text
//! level(t) = level(t-1) + eta(t),   eta ~ N(0, q sigma2)
//! x(t)     = level(t) + eps(t),     eps ~ N(0, sigma2)
//! ```
//!
//! The level starts diffuse. `sigma2` is concentrated out of the likelihood, so
//! only the signal-to-noise ratio `q` is searched (on a log grid refined by
//! golden-section search). Missing cells receive the smoothed level.

use super::{fill_missing, knots, too_few};
use crate::error::Result;

const LOG_Q_MIN: f64 = -16.0;
const LOG_Q_MAX: f64 = 10.0;
const GRID: usize = 53;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLevelFit {
    pub level_variance: f64,
    pub noise_variance: f64,
    /// Concentrated log-likelihood, constants dropped.
    pub log_likelihood: f64,
    /// Observed values had zero variance; the imputation is their mean.
    pub degenerate: bool,
}

pub fn impute_kalman(values: &[Option<f64>]) -> Result<Vec<f64>> {
    impute_kalman_with_fit(values).map(|(v, _)| v)
}

pub fn impute_kalman_with_fit(values: &[Option<f64>]) -> Result<(Vec<f64>, LocalLevelFit)> {
    let knots = knots(values);
    if knots.len() < 3 {
        return Err(too_few("kalman", 3, knots.len()));
    }
    let mean = knots.iter().map(|k| k.1).sum::<f64>() / knots.len() as f64;
    if knots.iter().all(|k| k.1 == knots[0].1) {
        let fit = LocalLevelFit {
            level_variance: 0.0,
            noise_variance: 0.0,
            log_likelihood: f64::NAN,
            degenerate: true,
        };
        return Ok((fill_missing(values, |_| mean), fit));
    }

    let objective = |log_q: f64| filter(values, log_q.exp()).log_likelihood;
    let step = (LOG_Q_MAX - LOG_Q_MIN) / (GRID - 1) as f64;
    let best = (0..GRID)
        .map(|i| LOG_Q_MIN + step * i as f64)
        .map(|lq| (lq, objective(lq)))
        .fold((LOG_Q_MIN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let lo = (best.0 - step).max(LOG_Q_MIN);
    let hi = (best.0 + step).min(LOG_Q_MAX);
    let log_q = golden_max(objective, lo, hi);

    let q = log_q.exp();
    let run = filter(values, q);
    let level = smooth(&run);
    let fit = LocalLevelFit {
        level_variance: q * run.sigma2,
        noise_variance: run.sigma2,
        log_likelihood: run.log_likelihood,
        degenerate: false,
    };
    Ok((fill_missing(values, |t| level[t]), fit))
}

struct FilterRun {
    first: usize,
    /// Predicted and filtered mean/variance (variances in units of sigma2).
    a_pred: Vec<f64>,
    p_pred: Vec<f64>,
    a_filt: Vec<f64>,
    p_filt: Vec<f64>,
    sigma2: f64,
    log_likelihood: f64,
}

fn filter(values: &[Option<f64>], q: f64) -> FilterRun {
    let n = values.len();
    let first = values.iter().position(Option::is_some).expect("at least one observation");
    let mut a_pred = vec![0.0; n];
    let mut p_pred = vec![0.0; n];
    let mut a_filt = vec![0.0; n];
    let mut p_filt = vec![0.0; n];
    // Exact diffuse start: after the first observation the level is that value
    // with the observation-noise variance.
    a_filt[first] = values[first].unwrap();
    p_filt[first] = 1.0;
    a_pred[first] = a_filt[first];
    p_pred[first] = f64::INFINITY;

    let (mut sum_scaled, mut sum_log_f, mut count) = (0.0, 0.0, 0usize);
    for t in first + 1..n {
        a_pred[t] = a_filt[t - 1];
        p_pred[t] = p_filt[t - 1] + q;
        match values[t] {
            Some(x) => {
                let f = p_pred[t] + 1.0;
                let v = x - a_pred[t];
                a_filt[t] = a_pred[t] + p_pred[t] / f * v;
                p_filt[t] = p_pred[t] / f;
                sum_scaled += v * v / f;
                sum_log_f += f.ln();
                count += 1;
            }
            None => {
                a_filt[t] = a_pred[t];
                p_filt[t] = p_pred[t];
            }
        }
    }
    let sigma2 = sum_scaled / count as f64;
    let log_likelihood = if sigma2 > 0.0 {
        -0.5 * (count as f64 * sigma2.ln() + sum_log_f)
    } else {
        f64::INFINITY
    };
    FilterRun {
        first,
        a_pred,
        p_pred,
        a_filt,
        p_filt,
        sigma2,
        log_likelihood,
    }
}

/// Rauch-Tung-Striebel smoother; cells before the first observation take the
/// smoothed level at that observation.
fn smooth(run: &FilterRun) -> Vec<f64> {
    let n = run.a_filt.len();
    let mut level = run.a_filt.clone();
    for t in (run.first..n - 1).rev() {
        let gain = run.p_filt[t] / run.p_pred[t + 1];
        level[t] = run.a_filt[t] + gain * (level[t + 1] - run.a_pred[t + 1]);
    }
    for t in 0..run.first {
        level[t] = level[run.first];
    }
    level
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > GOLDEN_TOL {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}
