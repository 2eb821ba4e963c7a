use serde::{Deserialize, Serialize};

use super::CompactSet1D;
use crate::error::{Error, Result};

/// Samples of a scalar C¹ extension with the sampled Whitney quotient of
/// the input data on `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Whitney1D {
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// `max |f(t) - f(τ) - f'(τ)(t - τ)| / |t - τ|` over consecutive samples of K.
    pub max_quotient: f64,
    /// `max_quotient` exceeds the tolerance passed in.
    pub violation: bool,
}

fn hermite(t: f64, a: f64, b: f64, fa: f64, ma: f64, fb: f64, mb: f64) -> (f64, f64) {
    let l = b - a;
    let s = (t - a) / l;
    let (s2, s3) = (s * s, s * s * s);
    let v = (2.0 * s3 - 3.0 * s2 + 1.0) * fa
        + (s3 - 2.0 * s2 + s) * l * ma
        + (-2.0 * s3 + 3.0 * s2) * fb
        + (s3 - s2) * l * mb;
    let d = (6.0 * s2 - 6.0 * s) * (fa - fb) / l + (3.0 * s2 - 4.0 * s + 1.0) * ma + (3.0 * s2 - 2.0 * s) * mb;
    (v, d)
}

/// Classical C¹ Whitney extension of `(f, f')` from `K` to the sampling grid:
/// data on `K` is copied, each gap is filled by the cubic Hermite
/// interpolant of the endpoint data, and the function continues linearly
/// outside `[min K, max K]`.
pub fn classical_whitney_1d(k: &CompactSet1D, times: &[f64], f: &[f64], fp: &[f64], tol: f64) -> Result<Whitney1D> {
    crate::horizontal::check_grid(times)?;
    if f.len() != times.len() || fp.len() != times.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: f.len().min(fp.len()),
        });
    }
    let idx = |t: f64| {
        times
            .binary_search_by(|s| s.total_cmp(&t))
            .map_err(|_| Error::InvalidFragment(format!("K endpoint {t} is not a grid point")))
    };
    let ends: Vec<(usize, usize)> = k
        .intervals()
        .iter()
        .map(|&(a, b)| Ok((idx(a)?, idx(b)?)))
        .collect::<Result<_>>()?;

    let mut max_q: f64 = 0.0;
    for &(i, j) in &ends {
        for m in i..j {
            let h = times[m + 1] - times[m];
            let q1 = (f[m + 1] - f[m] - fp[m] * h).abs() / h;
            let q2 = (f[m] - f[m + 1] + fp[m + 1] * h).abs() / h;
            max_q = max_q.max(q1).max(q2);
        }
    }

    let (first, last) = (ends[0].0, ends[ends.len() - 1].1);
    let mut values = f.to_vec();
    let mut derivs = fp.to_vec();
    for m in 0..first {
        derivs[m] = fp[first];
        values[m] = f[first] + fp[first] * (times[m] - times[first]);
    }
    for m in last + 1..times.len() {
        derivs[m] = fp[last];
        values[m] = f[last] + fp[last] * (times[m] - times[last]);
    }
    for w in ends.windows(2) {
        let (ia, ib) = (w[0].1, w[1].0);
        let (a, b) = (times[ia], times[ib]);
        for m in ia + 1..ib {
            let (v, d) = hermite(times[m], a, b, f[ia], fp[ia], f[ib], fp[ib]);
            values[m] = v;
            derivs[m] = d;
        }
    }
    Ok(Whitney1D {
        values,
        derivs,
        max_quotient: max_q,
        violation: max_q > tol,
    })
}
