use super::{fill_missing, knots, too_few};
use crate::error::Result;

/// Stineman's rational interpolant through the observed points, with knot
/// slopes from the Stineman rule evaluated on data scaled to the unit box
/// (which makes the result independent of the units of `t` and `x`).
/// Missing cells before the first and after the last observation take the
/// nearest observed value.
pub fn impute_stine(values: &[Option<f64>]) -> Result<Vec<f64>> {
    let knots = knots(values);
    if knots.len() < 2 {
        return Err(too_few("stine", 2, knots.len()));
    }
    let x: Vec<f64> = knots.iter().map(|k| k.0 as f64).collect();
    let y: Vec<f64> = knots.iter().map(|k| k.1).collect();
    let slopes = slopes(&x, &y);
    let last = knots.len() - 1;
    Ok(fill_missing(values, |t| {
        let t = t as f64;
        if t <= x[0] {
            return y[0];
        }
        if t >= x[last] {
            return y[last];
        }
        let i = x.partition_point(|k| *k <= t) - 1;
        interpolate(x[i], x[i + 1], y[i], y[i + 1], slopes[i], slopes[i + 1], t)
    }))
}

/// Stineman knot slopes at the observed points of `values`, in data units.
pub fn stineman_slopes(values: &[Option<f64>]) -> Result<Vec<f64>> {
    let knots = knots(values);
    if knots.len() < 2 {
        return Err(too_few("stine", 2, knots.len()));
    }
    let x: Vec<f64> = knots.iter().map(|k| k.0 as f64).collect();
    let y: Vec<f64> = knots.iter().map(|k| k.1).collect();
    Ok(slopes(&x, &y))
}

/// Knot slopes in data units.
fn slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let range = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(*a), hi.max(*a)));
        if hi > lo { hi - lo } else { 1.0 }
    };
    let (xs, ys) = (range(x), range(y));
    let dx: Vec<f64> = x.windows(2).map(|w| (w[1] - w[0]) / xs).collect();
    let dy: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / ys).collect();

    let mut yp = vec![0.0; n];
    if n == 2 {
        yp.fill(dy[0] / dx[0]);
    } else {
        for i in 1..n - 1 {
            let wp = dx[i] * dx[i] + dy[i] * dy[i];
            let wm = dx[i - 1] * dx[i - 1] + dy[i - 1] * dy[i - 1];
            yp[i] = (dy[i - 1] * wp + dy[i] * wm) / (dx[i - 1] * wp + dx[i] * wm);
        }
        yp[0] = end_slope(dy[0] / dx[0], yp[1]);
        yp[n - 1] = end_slope(dy[n - 2] / dx[n - 2], yp[n - 2]);
    }
    let unit = ys / xs;
    yp.into_iter().map(|s| s * unit).collect()
}

fn end_slope(secant: f64, inner: f64) -> f64 {
    if (secant >= 0.0 && secant >= inner) || (secant <= 0.0 && secant <= inner) {
        2.0 * secant - inner
    } else {
        secant + secant.abs() * (secant - inner) / (secant.abs() + inner.abs())
    }
}

/// Stineman's interpolation formula on `[x1, x2]`.
fn interpolate(x1: f64, x2: f64, y1: f64, y2: f64, yp1: f64, yp2: f64, t: f64) -> f64 {
    let s = (y2 - y1) / (x2 - x1);
    let y0 = y1 + s * (t - x1);
    let dy1 = (t - x1) * (yp1 - s);
    let dy2 = (t - x2) * (yp2 - s);
    let prod = dy1 * dy2;
    if prod > 0.0 {
        y0 + prod / (dy1 + dy2)
    } else if prod < 0.0 {
        y0 + prod * (t - x1 + t - x2) / ((dy1 - dy2) * (x2 - x1))
    } else {
        y0
    }
}
