//! Synthetic autoregressive series and nested uniform missingness.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::timeseries::{Mask, TimeSeries};

pub const DEFAULT_BURN_IN: usize = 100;

/// Coefficients of the 7-variable VAR(1) benchmark model.
pub const BENCHMARK_VAR1: [[f64; 7]; 7] = [
    [0.6, 0.22, 0.13, 0.02, 0.05, 0.003, 0.0004],
    [0.6, 0.12, 0.19, 0.03, 0.03, 0.004, 0.00041],
    [0.5, 0.15, 0.12, 0.07, 0.04, 0.007, 0.00042],
    [0.6, 0.13, 0.19, 0.04, 0.03, 0.003, 0.00043],
    [0.4, 0.122, 0.15, 0.07, 0.02, 0.001, 0.00044],
    [0.55, 0.162, 0.17, 0.13, 0.03, 0.0045, 0.00045],
    [0.45, 0.152, 0.12, 0.07, 0.01, 0.0082, 0.00046],
];

/// Lag coefficients of the AR(3) benchmark model, lag 1 first.
pub const BENCHMARK_AR3: [f64; 3] = [0.1, -0.3, 0.9];

/// `x(t) = A x(t-1) + e(t)` with independent Gaussian innovations.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    /// Row-major `d x d` coefficient matrix.
    pub coefficients: Vec<Vec<f64>>,
    /// Per-variable innovation standard deviation.
    pub scale: Vec<f64>,
    pub burn_in: usize,
}

impl VarModel {
    pub fn benchmark_var1() -> Self {
        Self {
            coefficients: BENCHMARK_VAR1.iter().map(|r| r.to_vec()).collect(),
            scale: vec![1.0; 7],
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || self.coefficients.iter().any(|r| r.len() != d) || self.scale.len() != d {
            return Err(Error::InvalidArgument("VAR model must be d x d with d scales".into()));
        }
        Ok(())
    }
}

/// `x(t) = sum_i phi_i x(t-i) + e(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    /// `phi_1, phi_2, ...`.
    pub coefficients: Vec<f64>,
    pub scale: f64,
    pub burn_in: usize,
}

impl ArModel {
    pub fn benchmark_ar3() -> Self {
        Self {
            coefficients: BENCHMARK_AR3.to_vec(),
            scale: 1.0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

/// Simulates `n` steps after the burn-in, starting from `x(0) = 0`.
pub fn generate_var1(model: &VarModel, n: usize, seed: u64) -> Result<TimeSeries> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let d = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut columns = vec![Vec::with_capacity(n); d];
    for step in 0..model.burn_in + n {
        for (v, slot) in next.iter_mut().enumerate() {
            let drift: f64 = model.coefficients[v].iter().zip(&state).map(|(a, x)| a * x).sum();
            let e: f64 = rng.sample(StandardNormal);
            *slot = drift + model.scale[v] * e;
        }
        std::mem::swap(&mut state, &mut next);
        if step >= model.burn_in {
            for (col, x) in columns.iter_mut().zip(&state) {
                col.push(*x);
            }
        }
    }
    TimeSeries::from_columns(columns)
}

/// Simulates `n` steps after the burn-in with a zero pre-sample history.
pub fn generate_ar(model: &ArModel, n: usize, seed: u64) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if model.coefficients.is_empty() {
        return Err(Error::InvalidArgument("AR model needs at least one coefficient".into()));
    }
    let p = model.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // history[0] is x(t-1).
    let mut history = vec![0.0; p];
    let mut out = Vec::with_capacity(n);
    for step in 0..model.burn_in + n {
        let drift: f64 = model.coefficients.iter().zip(&history).map(|(c, x)| c * x).sum();
        let e: f64 = rng.sample(StandardNormal);
        let x = drift + model.scale * e;
        history.rotate_right(1);
        history[0] = x;
        if step >= model.burn_in {
            out.push(x);
        }
    }
    TimeSeries::from_columns(vec![out])
}

/// Missingness at several percentages, nested: every cell missing at a lower
/// level is also missing at every higher one.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingnessPlan {
    pub levels: Vec<f64>,
    /// One mask per level (`true` = observed).
    pub masks: Vec<Mask>,
    pub seed: u64,
}

impl MissingnessPlan {
    pub fn mask_for(&self, level: f64) -> Option<&Mask> {
        self.levels.iter().position(|l| *l == level).map(|i| &self.masks[i])
    }

    /// `series` with the cells of level `index` removed.
    pub fn apply(&self, series: &TimeSeries, index: usize) -> Result<TimeSeries> {
        series.with_mask(&self.masks[index])
    }
}

/// Default benchmark levels: 10%, 20%, ..., 70%.
pub fn default_levels() -> Vec<f64> {
    (1..=7).map(|i| f64::from(i * 10)).collect()
}

/// Number of cells removed at `level` percent of `cells`, rounding half up.
pub fn missing_count(level: f64, cells: usize) -> usize {
    (level * cells as f64 / 100.0 + 0.5).floor() as usize
}

/// Draws one uniform permutation of the `n x d` cells; level `l` removes the
/// first `round(l / 100 * n * d)` cells of it.
pub fn degrade(shape: (usize, usize), levels: &[f64], seed: u64) -> Result<MissingnessPlan> {
    let (n, d) = shape;
    if let Some(bad) = levels.iter().find(|l| !(**l >= 0.0 && **l < 100.0)) {
        return Err(Error::InvalidArgument(format!("missingness level {bad} outside [0, 100)")));
    }
    let cells = n * d;
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let masks = levels
        .iter()
        .map(|&level| {
            let mut observed = vec![true; cells];
            for &c in &order[..missing_count(level, cells)] {
                observed[c] = false;
            }
            Mask::from_vec(n, d, observed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MissingnessPlan {
        levels: levels.to_vec(),
        masks,
        seed,
    })
}
