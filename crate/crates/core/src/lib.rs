//! Hankel imputation (HI) for gappy uni- and multivariate time-series.
//!
//! A series of length `n` in `d` variables is embedded as an
//! `(n - k + 1) x (k d)` block-Hankel matrix, the missing entries of that
//! matrix are completed by nuclear-norm minimisation (singular value
//! thresholding), and the completed matrix is averaged back onto the time
//! axis. The crate also carries the experimental apparatus around the method:
//! synthetic generators, nested missingness, five univariate baseline
//! imputers, trend/noise scoring and benchmark sweeps.
//!
//! ```
//! use hi_core::{impute_hi, HiConfig, TimeSeries};
//!
//! let x: Vec<Option<f64>> = (0..40)
//!     .map(|t| (t % 5 != 2).then(|| (t as f64 * 0.4).sin()))
//!     .collect();
//! let series = TimeSeries::univariate(x).unwrap();
//! let out = impute_hi(&series, &HiConfig::default()).unwrap();
//! assert!(out.series.is_complete());
//! assert!((out.series.value(2, 0) - 0.8f64.sin()).abs() < 0.1);
//! ```

pub mod baselines;
pub mod error;
pub mod hankel;
pub mod imputer;
pub mod scoring;
pub mod svt;
pub mod sweep;
pub mod synthetic;
pub mod timeseries;

pub use baselines::{impute_baseline, BaselineMethod};
pub use error::{Error, Result};
pub use faer::{Mat, MatRef};
pub use hankel::{dehankelize, hankelize, BlockHankel, MaskedMatrix};
pub use imputer::{auto_lag, impute_hi, split_blocks, HiConfig, ImputeResult, Lag};
pub use scoring::{aggregate, decompose, score, Aggregate, MeanCi, ScorePair, SmoothConfig};
pub use sweep::{split_seed, Axis, BenchSpec, Dataset, Method, SweepResult};
pub use svt::{complete, nuclear_norm, CompletionResult, SolverConfig};
pub use synthetic::{degrade, generate_ar, generate_var1, ArModel, MissingnessPlan, VarModel};
pub use timeseries::{Mask, TimeSeries};
