use super::{fill_missing, knots, too_few};
use crate::error::Result;

/// Natural cubic spline through the observed points, continued linearly with
/// the boundary slope outside the observed range. A single observation gives
/// a constant.
pub fn impute_spline(values: &[Option<f64>]) -> Result<Vec<f64>> {
    let knots = knots(values);
    match knots.len() {
        0 => Err(too_few("spline", 1, 0)),
        1 => Ok(fill_missing(values, |_| knots[0].1)),
        _ => {
            let spline = NaturalSpline::new(&knots);
            Ok(fill_missing(values, |t| spline.eval(t as f64)))
        }
    }
}

struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalSpline {
    fn new(knots: &[(usize, f64)]) -> Self {
        let x: Vec<f64> = knots.iter().map(|k| k.0 as f64).collect();
        let y: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives (Thomas algorithm).
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let inner = n - 2;
            let mut diag = vec![0.0; inner];
            let mut rhs = vec![0.0; inner];
            for i in 0..inner {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..inner {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[inner] = rhs[inner - 1] / diag[inner - 1];
            for i in (0..inner - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        Self { x, y, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let (x, y, m) = (&self.x, &self.y, &self.m);
        let last = x.len() - 1;
        if t <= x[0] {
            let h = x[1] - x[0];
            let slope = (y[1] - y[0]) / h - h * m[1] / 6.0;
            return y[0] + slope * (t - x[0]);
        }
        if t >= x[last] {
            let h = x[last] - x[last - 1];
            let slope = (y[last] - y[last - 1]) / h + h * m[last - 1] / 6.0;
            return y[last] + slope * (t - x[last]);
        }
        let i = x.partition_point(|k| *k <= t) - 1;
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
    }
}
