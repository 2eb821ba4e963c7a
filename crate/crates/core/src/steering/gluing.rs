//! Pre-roll and dilated concatenation used to glue steering curves.

use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::horizontal::{lift, uniform_grid, Controls, SampledCurve};
use crate::poly::Poly;

/// Horizontal curve on `[0, ρ]` from the identity with derivative
/// `(t Y0 + (ρ - t) W) / ρ`, sampled at `n` points.
pub fn preroll(rho: f64, w: &Horizontal, y0: &Horizontal, n: usize) -> Result<SampledCurve> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("pre-roll length {rho} outside (0, 1)")));
    }
    let lin = |k: usize| Poly::new(vec![w[k], (y0[k] - w[k]) / rho]);
    let c = Controls::polynomial(lin(0), lin(1), 0.0, rho);
    lift(&c, &[0.0; 4], &uniform_grid(0.0, rho, n.max(2)))
}

/// The curve `t ↦ x_ρ δ_{1-ρ}(inner((t - ρ) / (1 - ρ)))` on `[ρ, 1]`, sampled at
/// the images of the inner samples. Its derivative at `t` is the inner
/// derivative at `(t - ρ) / (1 - ρ)`.
pub fn concat_scaled(x_rho: &Coords, rho: f64, inner: &SampledCurve) -> Result<SampledCurve> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "concatenation point {rho} outside [0, 1)"
        )));
    }
    let (s0, s1) = inner.domain();
    if s0 != 0.0 || s1 != 1.0 {
        return Err(Error::InvalidGrid(format!(
            "inner curve must live on [0, 1], found [{s0}, {s1}]"
        )));
    }
    let lam = 1.0 - rho;
    let times: Vec<f64> = inner.times().iter().map(|s| rho + lam * s).collect();
    let points = inner
        .points()
        .iter()
        .map(|p| engel::mul_second(x_rho, &engel::dilate(lam, p)))
        .collect();
    SampledCurve::new(times, points, inner.derivs().map(|d| d.to_vec()))
}
