use super::{fill_missing, knots, too_few};
use crate::error::Result;

/// Straight line between the nearest observed neighbours; nearest observed
/// value before the first and after the last observation.
pub fn impute_linear(values: &[Option<f64>]) -> Result<Vec<f64>> {
    let knots = knots(values);
    if knots.is_empty() {
        return Err(too_few("linear", 1, 0));
    }
    let mut next = 0;
    Ok(fill_missing(values, |t| {
        while next < knots.len() && knots[next].0 < t {
            next += 1;
        }
        match (next.checked_sub(1).map(|i| knots[i]), knots.get(next)) {
            (Some((t0, y0)), Some(&(t1, y1))) => {
                let w = (t - t0) as f64 / (t1 - t0) as f64;
                y0 + w * (y1 - y0)
            }
            (Some((_, y)), None) | (None, Some(&(_, y))) => y,
            (None, None) => unreachable!("knots is non-empty"),
        }
    }))
}
