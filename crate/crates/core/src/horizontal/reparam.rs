use super::{uniform_grid, SampledCurve, SampledFunction};
use crate::error::Result;
use crate::quadrature::adaptive_simpson;

/// Reparameterizes a curve with derivatives by arc length.
///
/// Returns `(φ, F)` with `F(t) = ∫ |u|` from the start and `φ` sampled on a
/// uniform grid of `[0, T]`, `T` the total length, so that `γ = φ ∘ F`. The
/// derivative of `φ` is `u / |u|` at the matched time. A curve of zero length
/// gives a one-point `φ` and `F ≡ 0`.
pub fn arclength_reparam(curve: &SampledCurve) -> Result<(SampledCurve, SampledFunction)> {
    let d = curve.require_derivs()?;
    let times = curve.times();
    let n = times.len();
    let speed = |t: f64| {
        let u = curve.eval_deriv(t).unwrap_or([0.0, 0.0]);
        u[0].hypot(u[1])
    };
    let mut f = vec![0.0; n];
    for i in 1..n {
        f[i] = f[i - 1] + adaptive_simpson(speed, times[i - 1], times[i], 1e-13);
    }
    let total = f[n - 1];
    let big_f = SampledFunction {
        times: times.to_vec(),
        values: f.clone(),
    };
    if total <= 0.0 || n < 2 {
        let phi = SampledCurve::new(vec![0.0], vec![curve.start()], Some(vec![[0.0, 0.0]]))?;
        return Ok((phi, big_f));
    }

    let s_grid = uniform_grid(0.0, total, n);
    let mut pts = Vec::with_capacity(n);
    let mut ders = Vec::with_capacity(n);
    let mut cell = 0;
    for &s in &s_grid {
        while cell + 2 < n && f[cell + 1] < s {
            cell += 1;
        }
        // skip cells where F is flat
        while cell + 2 < n && f[cell + 1] <= f[cell] {
            cell += 1;
        }
        let (lo, hi) = (times[cell], times[cell + 1]);
        let t = invert_in_cell(&speed, lo, hi, f[cell], s);
        pts.push(curve.eval(t));
        let u = curve.eval_deriv(t)?;
        let m = u[0].hypot(u[1]);
        ders.push(if m > 0.0 {
            [u[0] / m, u[1] / m]
        } else {
            nearest_direction(d, cell)
        });
    }
    Ok((SampledCurve::new(s_grid, pts, Some(ders))?, big_f))
}

/// Solves `F(lo) + ∫_lo^t |u| = s` for `t` in `[lo, hi]` by bisection.
fn invert_in_cell<S: Fn(f64) -> f64>(speed: &S, lo: f64, hi: f64, f_lo: f64, s: f64) -> f64 {
    let local = |t: f64| {
        let m = 0.5 * (lo + t);
        f_lo + (t - lo) / 6.0 * (speed(lo) + 4.0 * speed(m) + speed(t))
    };
    if s <= f_lo {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    if local(b) <= s {
        return hi;
    }
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if local(m) < s {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn nearest_direction(d: &[[f64; 2]], cell: usize) -> [f64; 2] {
    let dist = |i: usize| i.abs_diff(cell);
    d.iter()
        .enumerate()
        .filter(|(_, u)| u[0].hypot(u[1]) > 0.0)
        .min_by_key(|(i, _)| dist(*i))
        .map(|(_, u)| {
            let m = u[0].hypot(u[1]);
            [u[0] / m, u[1] / m]
        })
        .unwrap_or([1.0, 0.0])
}
