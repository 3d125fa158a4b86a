//! Block-Hankel embedding of a series and anti-diagonal averaging back onto the time axis.
//!
//! For lag `k`, row `i` (0-based) of the embedding is `x(i), x(i+1), ..., x(i+k-1)`
//! laid out as `k` consecutive blocks of `d` entries, giving an
//! `(n - k + 1) x (k d)` matrix.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::timeseries::{Mask, TimeSeries};

/// Dense matrix with an observed-entry set. Entries outside the set are never read.
#[derive(Debug, Clone)]
pub struct MaskedMatrix {
    values: Mat<f64>,
    observed: Vec<bool>,
    omega: Vec<(usize, usize)>,
}

impl MaskedMatrix {
    /// `observed[(i, j)]` marks entry `(i, j)` as known.
    pub fn new(values: Mat<f64>, observed: &Mat<bool>) -> Result<Self> {
        if values.shape() != observed.shape() {
            return Err(Error::ShapeMismatch {
                expected: values.shape(),
                found: observed.shape(),
            });
        }
        let (rows, cols) = values.shape();
        let flags = (0..cols)
            .flat_map(|j| (0..rows).map(move |i| (i, j)))
            .map(|(i, j)| observed[(i, j)])
            .collect();
        Ok(Self::from_flags(values, flags))
    }

    /// Every entry observed.
    pub fn fully_observed(values: Mat<f64>) -> Self {
        let flags = vec![true; values.nrows() * values.ncols()];
        Self::from_flags(values, flags)
    }

    fn from_flags(values: Mat<f64>, observed: Vec<bool>) -> Self {
        let rows = values.nrows();
        let omega = observed
            .iter()
            .enumerate()
            .filter(|(_, o)| **o)
            .map(|(idx, _)| (idx % rows, idx / rows))
            .collect();
        Self {
            values,
            observed,
            omega,
        }
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn values(&self) -> MatRef<'_, f64> {
        self.values.as_ref()
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.observed[j * self.nrows() + i]
    }

    /// Observed positions in column-major order.
    pub fn omega(&self) -> &[(usize, usize)] {
        &self.omega
    }

    /// `M(i, j)` for an observed entry, `None` otherwise.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.is_observed(i, j).then(|| self.values[(i, j)])
    }
}

/// A series embedded as a block-Hankel matrix.
#[derive(Debug, Clone)]
pub struct BlockHankel {
    matrix: MaskedMatrix,
    lag: usize,
    n: usize,
    d: usize,
}

impl BlockHankel {
    pub fn matrix(&self) -> &MaskedMatrix {
        &self.matrix
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    /// `(n, d)` of the embedded series.
    pub fn source_shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }

    /// Number of rows in which time index `t` (0-based) appears.
    pub fn copies(&self, t: usize) -> usize {
        copies(self.n, self.lag, t)
    }
}

/// Number of rows of an `n`-long, lag-`k` embedding that contain time index `t` (0-based).
pub fn copies(n: usize, k: usize, t: usize) -> usize {
    let rows = n - k + 1;
    (t + 1).min(k).min(rows).min(n - t)
}

/// Embeds `series` with lag `k`. Missing cells stay unobserved in every copy.
pub fn hankelize(series: &TimeSeries, k: usize) -> Result<BlockHankel> {
    let (n, d) = series.shape();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("lag {k} outside [1, {n}]")));
    }
    let rows = n - k + 1;
    let cols = k * d;
    let values = Mat::from_fn(rows, cols, |i, c| series.value(i + c / d, c % d));
    let mut observed = Vec::with_capacity(rows * cols);
    for c in 0..cols {
        for i in 0..rows {
            observed.push(series.is_observed(i + c / d, c % d));
        }
    }
    Ok(BlockHankel {
        matrix: MaskedMatrix::from_flags(values, observed),
        lag: k,
        n,
        d,
    })
}

/// Averages every anti-diagonal block of `completed` back onto the time axis.
///
/// The result is fully observed. An exactly block-Hankel input is mapped back
/// to the series it came from.
pub fn dehankelize(completed: MatRef<'_, f64>, template: &BlockHankel) -> Result<TimeSeries> {
    if completed.shape() != template.matrix.shape() {
        return Err(Error::ShapeMismatch {
            expected: template.matrix.shape(),
            found: completed.shape(),
        });
    }
    let (n, d, k) = (template.n, template.d, template.lag);
    let rows = n - k + 1;
    let mut sums = vec![0.0; n * d];
    for block in 0..k {
        for v in 0..d {
            let col = completed.col(block * d + v);
            for i in 0..rows {
                sums[v * n + i + block] += col[i];
            }
        }
    }
    for v in 0..d {
        for t in 0..n {
            sums[v * n + t] /= copies(n, k, t) as f64;
        }
    }
    TimeSeries::from_parts(sums, Mask::all_observed(n, d))
}
