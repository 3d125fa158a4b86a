//! Dense and truncated singular value decompositions used by the thresholding loop.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Leading singular triplets, values in non-increasing order.
#[derive(Debug, Clone)]
pub struct Triplets {
    pub u: Mat<f64>,
    pub s: Vec<f64>,
    pub v: Mat<f64>,
}

impl Triplets {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Full thin SVD.
pub fn dense(a: MatRef<'_, f64>) -> Result<Triplets> {
    let svd = a.thin_svd().map_err(|_| Error::Svd)?;
    let s = svd.S().column_vector().iter().copied().collect();
    Ok(Triplets {
        u: svd.U().to_owned(),
        s,
        v: svd.V().to_owned(),
    })
}

const OVERSAMPLE: usize = 10;
const MAX_POWER_ITERS: usize = 60;
const POWER_TOL: f64 = 1e-12;

/// Leading `count` triplets by randomized subspace iteration with a Rayleigh-Ritz step.
///
/// `start` seeds the right subspace (typically the previous iterate's right
/// singular vectors); remaining columns are drawn from a fixed-seed Gaussian.
pub fn leading(a: MatRef<'_, f64>, count: usize, start: Option<MatRef<'_, f64>>) -> Result<Triplets> {
    let (rows, cols) = a.shape();
    let full = rows.min(cols);
    let count = count.clamp(1, full);
    let width = (count + OVERSAMPLE).min(full);
    if width == full {
        return dense(a).map(|t| truncate(t, count));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5bd0);
    let seeded = start.map_or(0, |s| s.ncols().min(width));
    let probe = Mat::from_fn(cols, width, |i, j| {
        if j < seeded {
            start.unwrap()[(i, j)]
        } else {
            StandardNormal.sample(&mut rng)
        }
    });

    let mut q = orthonormal(product(a, probe.as_ref()).as_ref());
    let mut previous: Option<Vec<f64>> = None;
    let mut ritz = rayleigh_ritz(a, q.as_ref())?;
    for _ in 0..MAX_POWER_ITERS {
        let s_now = ritz.s[..count].to_vec();
        if let Some(prev) = &previous {
            let scale = s_now[0].max(f64::MIN_POSITIVE);
            let change = prev
                .iter()
                .zip(&s_now)
                .map(|(p, c)| (p - c).abs())
                .fold(0.0, f64::max);
            if change <= POWER_TOL * scale {
                break;
            }
        }
        previous = Some(s_now);
        let z = orthonormal(product(a.transpose(), q.as_ref()).as_ref());
        q = orthonormal(product(a, z.as_ref()).as_ref());
        ritz = rayleigh_ritz(a, q.as_ref())?;
    }

    let u = product(q.as_ref(), ritz.u.as_ref());
    Ok(truncate(
        Triplets {
            u,
            s: ritz.s,
            v: ritz.v,
        },
        count,
    ))
}

/// SVD of `Q^T A`; its left vectors live in the basis `Q`.
fn rayleigh_ritz(a: MatRef<'_, f64>, q: MatRef<'_, f64>) -> Result<Triplets> {
    dense(product(q.transpose(), a).as_ref())
}

fn truncate(t: Triplets, count: usize) -> Triplets {
    let count = count.min(t.len());
    Triplets {
        u: t.u.subcols(0, count).to_owned(),
        s: t.s[..count].to_vec(),
        v: t.v.subcols(0, count).to_owned(),
    }
}

fn product(lhs: MatRef<'_, f64>, rhs: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(lhs.nrows(), rhs.ncols());
    matmul(out.as_mut(), Accum::Replace, lhs, rhs, 1.0, Par::Seq);
    out
}

fn orthonormal(a: MatRef<'_, f64>) -> Mat<f64> {
    a.qr().compute_thin_Q()
}

/// `U diag(s) V^T`.
pub fn reconstruct(u: MatRef<'_, f64>, s: &[f64], v: MatRef<'_, f64>, out: &mut Mat<f64>) {
    let r = s.len();
    let scaled = Mat::from_fn(u.nrows(), r, |i, j| u[(i, j)] * s[j]);
    matmul(
        out.as_mut(),
        Accum::Replace,
        scaled.as_ref(),
        v.subcols(0, r).transpose(),
        1.0,
        Par::Seq,
    );
}
