use rayon::prelude::*;

use super::{Controls, SampledCurve};
use crate::engel::{self, Coords};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::whitney::CurveFragment;

/// Three-point derivative weights at sample `i` of a possibly nonuniform
/// grid. Interior points use the central stencil, the ends one-sided
/// second-order stencils.
fn stencil(t: &[f64], i: usize) -> ([usize; 3], [f64; 3]) {
    let n = t.len();
    if i == 0 {
        let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
        (
            [0, 1, 2],
            [
                -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                (h1 + h2) / (h1 * h2),
                -h1 / (h2 * (h1 + h2)),
            ],
        )
    } else if i == n - 1 {
        let (h1, h2) = (t[n - 1] - t[n - 2], t[n - 2] - t[n - 3]);
        (
            [n - 1, n - 2, n - 3],
            [
                (2.0 * h1 + h2) / (h1 * (h1 + h2)),
                -(h1 + h2) / (h1 * h2),
                h1 / (h2 * (h1 + h2)),
            ],
        )
    } else {
        let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        (
            [i - 1, i, i + 1],
            [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))],
        )
    }
}

/// Finite-difference derivative of every coordinate at every sample.
pub(crate) fn fd_derivatives(times: &[f64], points: &[Coords]) -> Vec<Coords> {
    (0..times.len())
        .map(|i| {
            let (idx, w) = stencil(times, i);
            let mut d = [0.0; 4];
            for (j, wj) in idx.iter().zip(w) {
                for (k, dk) in d.iter_mut().enumerate() {
                    *dk += wj * points[*j][k];
                }
            }
            d
        })
        .collect()
}

/// Largest violation of `γ̇3 = γ1 γ̇2` and `γ̇4 = γ1² γ̇2 / 2` over the grid,
/// with derivatives taken by second-order finite differences.
pub fn horizontality_residual(curve: &SampledCurve) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: curve.len(),
        });
    }
    let d = fd_derivatives(curve.times(), curve.points());
    Ok(curve
        .points()
        .iter()
        .zip(&d)
        .map(|(x, dx)| {
            let r3 = (dx[2] - x[0] * dx[1]).abs();
            let r4 = (dx[3] - 0.5 * x[0] * x[0] * dx[1]).abs();
            r3.max(r4)
        })
        .fold(0.0, f64::max))
}

/// Sub-Riemannian length `∫ |u|`, by adaptive Simpson to tolerance 1e-10.
/// Sampled controls are integrated cell by cell since `|u|` may kink at samples.
pub fn curve_length(controls: &Controls) -> f64 {
    const TOL: f64 = 1e-10;
    let speed = |t: f64| {
        let u = controls.eval(t);
        u[0].hypot(u[1])
    };
    let bp = controls.breakpoints();
    let cells = (bp.len() - 1) as f64;
    bp.windows(2)
        .map(|w| adaptive_simpson(speed, w[0], w[1], TOL / cells))
        .sum()
}

/// Distance in `C¹_H`: the larger of the sup over the grid of the box
/// distance between points and of the Euclidean norm of the derivative gap.
pub fn c1h_distance(gamma: &SampledCurve, beta: &SampledCurve) -> Result<f64> {
    if gamma.times() != beta.times() {
        return Err(Error::GridMismatch);
    }
    let (dg, db) = (gamma.require_derivs()?, beta.require_derivs()?);
    let pos = gamma
        .points()
        .iter()
        .zip(beta.points())
        .map(|(x, y)| engel::box_dist_second(x, y))
        .fold(0.0, f64::max);
    let vel = dg
        .iter()
        .zip(db)
        .map(|(u, v)| (u[0] - v[0]).hypot(u[1] - v[1]))
        .fold(0.0, f64::max);
    Ok(pos.max(vel))
}

/// Sampled `r_{K,η}`: the sup over sample pairs `τ ≠ t` with `|t - τ| < η` of
/// `d(γ(t), γ(τ) exp((t - τ) X(τ))) / |t - τ|`. Zero when no pair qualifies.
pub fn difference_quotient_sup(frag: &CurveFragment, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidEta(eta));
    }
    let t = frag.times();
    let (p, x) = (frag.points(), frag.derivs());
    Ok((0..t.len())
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            let lo = t.partition_point(|&s| s <= t[i] - eta);
            let hi = t.partition_point(|&s| s < t[i] + eta);
            for j in lo..hi {
                if j == i {
                    continue;
                }
                let h = t[j] - t[i];
                if h.abs() >= eta {
                    continue;
                }
                let pred = engel::mul_second(&p[i], &engel::exp_horizontal_second(h, &x[i]));
                best = best.max(engel::box_dist_second(&p[j], &pred) / h.abs());
            }
            best
        })
        .reduce(|| 0.0, f64::max))
}
