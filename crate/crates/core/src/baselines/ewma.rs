use super::{fill_missing, too_few};
use crate::error::Result;

pub const DEFAULT_EWMA_WINDOW: usize = 4;

/// Weighted mean of the observed values within `window` steps on either side,
/// weight `2^-distance`. If none are in reach the window widens until one is.
pub fn impute_ewma(values: &[Option<f64>], window: usize) -> Result<Vec<f64>> {
    if values.iter().all(Option::is_none) {
        return Err(too_few("ewma", 1, 0));
    }
    let n = values.len();
    Ok(fill_missing(values, |t| {
        let mut reach = window.max(1);
        loop {
            let lo = t.saturating_sub(reach);
            let hi = (t + reach).min(n - 1);
            let (mut num, mut den) = (0.0, 0.0);
            for (s, v) in values.iter().enumerate().take(hi + 1).skip(lo) {
                if let Some(x) = v {
                    let w = 0.5f64.powi(s.abs_diff(t) as i32);
                    num += w * x;
                    den += w;
                }
            }
            if den > 0.0 {
                return num / den;
            }
            reach += 1;
        }
    }))
}
