//! Nuclear-norm matrix completion by singular value thresholding.
//!
//! Rank minimisation subject to agreement on the observed set is intractable,
//! so the solver targets its convex surrogate: minimise the nuclear norm
//! `||X||_*` subject to the relaxed data constraint
//!
//! ```text
//! sum_{(i,j) in Omega} (X(i,j) - M(i,j))^2 <= epsilon^2
//! ```
//!
//! The iteration keeps a dual matrix `Y` (initially zero):
//!
//! ```text
//! X <- shrink_tau(Y)                  soft-threshold the singular values of Y
//! Y <- Y + delta * P_Omega(M - X)
//! ```
//!
//! and stops as soon as the observed-set residual drops to `epsilon`, or after
//! `max_iters` iterations with the result flagged as not converged.

pub mod svd;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::hankel::MaskedMatrix;

use self::svd::Triplets;

/// Matrices whose shorter side is below this use a full dense SVD per iteration.
pub const DENSE_SVD_LIMIT: usize = 400;
/// Extra triplets requested above the previous rank in truncated mode.
const RANK_INCREMENT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdStrategy {
    /// Dense below [`DENSE_SVD_LIMIT`] on the shorter side, truncated above.
    #[default]
    Auto,
    Dense,
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Absolute Frobenius tolerance on the observed-set residual.
    pub epsilon: f64,
    /// Shrinkage level; `None` uses `5 sqrt(rows cols)`.
    pub threshold: Option<f64>,
    /// Dual step; `None` uses `min(1.9, 1.2 rows cols / |Omega|)`.
    pub step_size: Option<f64>,
    pub max_iters: usize,
    /// Upper bound on the number of singular triplets kept per iteration.
    pub svd_rank_cap: Option<usize>,
    pub svd_strategy: SvdStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            threshold: None,
            step_size: None,
            max_iters: 500,
            svd_rank_cap: None,
            svd_strategy: SvdStrategy::Auto,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("threshold must be positive, got {t}"));
            }
        }
        if let Some(s) = self.step_size {
            if !(s > 0.0 && s < 2.0) {
                return bad(format!("step size must lie in (0, 2), got {s}"));
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if self.svd_rank_cap == Some(0) {
            return bad("svd_rank_cap must be at least 1".into());
        }
        Ok(())
    }

    pub fn threshold_for(&self, rows: usize, cols: usize) -> f64 {
        self.threshold
            .unwrap_or_else(|| 5.0 * ((rows * cols) as f64).sqrt())
    }

    pub fn step_for(&self, rows: usize, cols: usize, observed: usize) -> f64 {
        self.step_size
            .unwrap_or_else(|| (1.2 * (rows * cols) as f64 / observed as f64).min(1.9))
    }
}

#[derive(Debug, Clone)]
pub struct CompletionResult {
    pub matrix: Mat<f64>,
    pub iterations: usize,
    /// `sqrt(sum over Omega of (X - M)^2)` at the returned iterate.
    pub residual: f64,
    pub nuclear_norm: f64,
    /// Singular values of `X` above `1e-6` times the largest.
    pub rank_estimate: usize,
    pub converged: bool,
}

/// Sum of singular values.
pub fn nuclear_norm(matrix: MatRef<'_, f64>) -> f64 {
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return 0.0;
    }
    matrix
        .singular_values()
        .map(|s| s.iter().sum())
        .unwrap_or(f64::NAN)
}

/// Soft-thresholds the singular values of `a` at `tau`, keeping its singular
/// vectors. At most `cap` triplets survive.
pub fn shrink(a: MatRef<'_, f64>, tau: f64, cap: Option<usize>) -> Result<Mat<f64>> {
    let t = svd::dense(a)?;
    let kept = thresholded(&t, tau, cap);
    let mut out = Mat::zeros(a.nrows(), a.ncols());
    svd::reconstruct(t.u.as_ref(), &kept, t.v.as_ref(), &mut out);
    Ok(out)
}

fn thresholded(t: &Triplets, tau: f64, cap: Option<usize>) -> Vec<f64> {
    t.s.iter()
        .take(cap.unwrap_or(usize::MAX))
        .map(|s| s - tau)
        .take_while(|s| *s > 0.0)
        .collect()
}

/// Completes `input` under `config`.
///
/// Non-convergence is reported through [`CompletionResult::converged`], not as an error.
pub fn complete(input: &MaskedMatrix, config: &SolverConfig) -> Result<CompletionResult> {
    config.validate()?;
    let (rows, cols) = input.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("matrix must be non-empty".into()));
    }
    let omega = input.omega();
    if omega.is_empty() {
        return Err(Error::NoObservations);
    }
    let tau = config.threshold_for(rows, cols);
    let delta = config.step_for(rows, cols, omega.len());
    let full_rank = rows.min(cols);
    let cap = config.svd_rank_cap.unwrap_or(full_rank).min(full_rank);
    let truncated = match config.svd_strategy {
        SvdStrategy::Auto => full_rank >= DENSE_SVD_LIMIT,
        SvdStrategy::Dense => false,
        SvdStrategy::Truncated => true,
    };
    let m = input.values();

    let mut y = Mat::<f64>::zeros(rows, cols);
    let mut x = Mat::<f64>::zeros(rows, cols);
    let mut shrunk: Vec<f64> = Vec::new();
    let mut warm: Option<Mat<f64>> = None;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=config.max_iters {
        iterations = it;
        if it == 1 {
            // Y = 0, so the first proposal is X = 0.
            shrunk.clear();
        } else {
            let t = if truncated {
                leading_above(y.as_ref(), tau, cap, shrunk.len(), warm.as_ref())?
            } else {
                svd::dense(y.as_ref())?
            };
            shrunk = thresholded(&t, tau, Some(cap));
            if shrunk.is_empty() {
                x.fill(0.0);
            } else {
                svd::reconstruct(t.u.as_ref(), &shrunk, t.v.as_ref(), &mut x);
            }
            if truncated {
                warm = Some(t.v);
            }
        }

        let mut sq = 0.0;
        for &(i, j) in omega {
            let r = m[(i, j)] - x[(i, j)];
            sq += r * r;
        }
        residual = sq.sqrt();
        if residual <= config.epsilon {
            converged = true;
            break;
        }
        for &(i, j) in omega {
            y[(i, j)] += delta * (m[(i, j)] - x[(i, j)]);
        }
    }

    let largest = shrunk.first().copied().unwrap_or(0.0);
    let rank_estimate = shrunk.iter().filter(|s| **s > 1e-6 * largest).count();
    Ok(CompletionResult {
        matrix: x,
        iterations,
        residual,
        nuclear_norm: shrunk.iter().sum(),
        rank_estimate,
        converged,
    })
}

/// Grows the number of computed triplets until the smallest one falls below `tau`
/// (or the cap is reached), starting from `previous_rank + RANK_INCREMENT`.
fn leading_above(
    y: MatRef<'_, f64>,
    tau: f64,
    cap: usize,
    previous_rank: usize,
    warm: Option<&Mat<f64>>,
) -> Result<Triplets> {
    let mut want = (previous_rank + RANK_INCREMENT).min(cap);
    loop {
        let t = svd::leading(y, want, warm.map(|w| w.as_ref()))?;
        let smallest = t.s.last().copied().unwrap_or(0.0);
        if smallest <= tau || want >= cap {
            return Ok(t);
        }
        want = (want + RANK_INCREMENT).min(cap);
    }
}
