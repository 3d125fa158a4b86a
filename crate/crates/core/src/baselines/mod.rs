//! Univariate comparator imputers. Multivariate series are imputed one
//! variable at a time.
//!
//! These follow the method definitions, not any particular package's
//! numerics. Parameters that such packages leave as defaults are fixed here:
//!
//! - spline: natural end conditions, linear continuation of the boundary slope
//!   outside the observed range;
//! - Stineman: slopes from the scaled Stineman rule, constant continuation
//!   outside the observed range;
//! - Kalman: local-level structural model fitted by maximum likelihood,
//!   imputations from the fixed-interval smoother;
//! - EWMA: half-width 4, weights halving per step of distance.
//!
//! Every method returns observed cells unchanged.

mod ewma;
mod kalman;
mod linear;
mod spline;
mod stine;

use std::fmt;
use std::str::FromStr;

pub use ewma::{impute_ewma, DEFAULT_EWMA_WINDOW};
pub use kalman::{impute_kalman, impute_kalman_with_fit, LocalLevelFit};
pub use linear::impute_linear;
pub use spline::impute_spline;
pub use stine::{impute_stine, stineman_slopes};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Linear,
    Spline,
    Stine,
    Kalman,
    /// Half-width of the averaging window.
    Ewma { window: usize },
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 5] = [
        BaselineMethod::Linear,
        BaselineMethod::Spline,
        BaselineMethod::Stine,
        BaselineMethod::Kalman,
        BaselineMethod::Ewma { window: DEFAULT_EWMA_WINDOW },
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BaselineMethod::Linear => "linear",
            BaselineMethod::Spline => "spline",
            BaselineMethod::Stine => "stine",
            BaselineMethod::Kalman => "kalman",
            BaselineMethod::Ewma { .. } => "ewma",
        }
    }

    /// Imputes one variable.
    pub fn impute(&self, values: &[Option<f64>]) -> Result<Vec<f64>> {
        match *self {
            BaselineMethod::Linear => impute_linear(values),
            BaselineMethod::Spline => impute_spline(values),
            BaselineMethod::Stine => impute_stine(values),
            BaselineMethod::Kalman => impute_kalman(values),
            BaselineMethod::Ewma { window } => impute_ewma(values, window),
        }
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown baseline method {s:?}")))
    }
}

/// Imputes every variable of `series` independently with `method`.
pub fn impute_baseline(series: &TimeSeries, method: BaselineMethod) -> Result<TimeSeries> {
    let columns = (0..series.dim())
        .map(|v| method.impute(&series.column_options(v)))
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::from_columns(columns)
}

/// Observed `(index, value)` pairs in time order.
fn knots(values: &[Option<f64>]) -> Vec<(usize, f64)> {
    values
        .iter()
        .enumerate()
        .filter_map(|(t, v)| v.map(|x| (t, x)))
        .collect()
}

fn too_few(method: &'static str, need: usize, have: usize) -> Error {
    Error::Baseline {
        method,
        msg: format!("needs at least {need} observed point(s), found {have}"),
    }
}

/// Fills missing cells of `values` with `fill(t)`, copying observed cells.
fn fill_missing(values: &[Option<f64>], mut fill: impl FnMut(usize) -> f64) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(t, v)| v.unwrap_or_else(|| fill(t)))
        .collect()
}
