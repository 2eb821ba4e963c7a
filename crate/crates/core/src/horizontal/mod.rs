//! Horizontal curves: control representations, lifting and curve metrics.

mod curve;
mod metrics;
mod reparam;

pub(crate) use curve::{check_grid, locate};
pub use curve::{fmt17, uniform_grid, SampledCurve, SampledFunction};
pub use metrics::{c1h_distance, curve_length, difference_quotient_sup, horizontality_residual};
pub use reparam::arclength_reparam;

use serde::{Deserialize, Serialize};

use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Planar controls `(u1, u2)` driving `γ' = u1 X1 + u2 X2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Controls {
    /// Exact polynomial controls on `domain`.
    Polynomial { u1: Poly, u2: Poly, domain: (f64, f64) },
    /// Samples on a strictly increasing grid, linearly interpolated.
    Sampled {
        times: Vec<f64>,
        u1: Vec<f64>,
        u2: Vec<f64>,
    },
}

impl Controls {
    pub fn polynomial(u1: Poly, u2: Poly, t0: f64, t1: f64) -> Self {
        Controls::Polynomial {
            u1,
            u2,
            domain: (t0, t1),
        }
    }

    pub fn constant(u: Horizontal, t0: f64, t1: f64) -> Self {
        Self::polynomial(Poly::constant(u[0]), Poly::constant(u[1]), t0, t1)
    }

    pub fn sampled(times: Vec<f64>, u1: Vec<f64>, u2: Vec<f64>) -> Result<Self> {
        let c = Controls::Sampled { times, u1, u2 };
        c.validate()?;
        Ok(c)
    }

    /// Checks the domain, grid and finiteness of the control values.
    pub fn validate(&self) -> Result<()> {
        match self {
            Controls::Polynomial { u1, u2, domain } => {
                if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
                    return Err(Error::InvalidGrid(format!("bad domain [{}, {}]", domain.0, domain.1)));
                }
                if !u1.is_finite() || !u2.is_finite() {
                    return Err(Error::NonFiniteControl(domain.0));
                }
            }
            Controls::Sampled { times, u1, u2 } => {
                check_grid(times)?;
                if times.len() < 2 {
                    return Err(Error::TooFewPoints {
                        needed: 2,
                        found: times.len(),
                    });
                }
                for v in [u1, u2] {
                    if v.len() != times.len() {
                        return Err(Error::DimensionMismatch {
                            expected: times.len(),
                            found: v.len(),
                        });
                    }
                }
                for (i, t) in times.iter().enumerate() {
                    if !u1[i].is_finite() || !u2[i].is_finite() {
                        return Err(Error::NonFiniteControl(*t));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Controls::Polynomial { domain, .. } => *domain,
            Controls::Sampled { times, .. } => (times[0], times[times.len() - 1]),
        }
    }

    pub fn eval(&self, t: f64) -> Horizontal {
        match self {
            Controls::Polynomial { u1, u2, .. } => [u1.eval(t), u2.eval(t)],
            Controls::Sampled { times, u1, u2 } => {
                let i = locate(times, t);
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                [u1[i] + w * (u1[i + 1] - u1[i]), u2[i] + w * (u2[i + 1] - u2[i])]
            }
        }
    }

    /// Points where the controls may fail to be smooth, including the domain ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Controls::Polynomial { domain, .. } => vec![domain.0, domain.1],
            Controls::Sampled { times, .. } => times.clone(),
        }
    }
}

/// Displacement `γ(h)` of the curve started at the identity whose controls
/// are the linear functions `u(s) = p + s q` on `[0, h]`, by exact quadrature.
pub(crate) fn linear_piece(h: f64, p: Horizontal, q: Horizontal) -> Coords {
    let u1 = Poly::new(vec![p[0], q[0]]);
    let u2 = Poly::new(vec![p[1], q[1]]);
    polynomial_piece(&u1, &u2, 0.0, h)
}

/// Lift from the identity at `t0` of polynomial controls, evaluated at `t`.
fn polynomial_piece(u1: &Poly, u2: &Poly, t0: f64, t: f64) -> Coords {
    let g = PolyLift::new(u1, u2, t0);
    g.eval(t)
}

/// Exact antiderivative polynomials of the lift ODEs.
pub(crate) struct PolyLift {
    g: [Poly; 4],
}

impl PolyLift {
    pub(crate) fn new(u1: &Poly, u2: &Poly, t0: f64) -> Self {
        let g1 = u1.integral_from(t0);
        let g2 = u2.integral_from(t0);
        let g3 = (&g1 * u2).integral_from(t0);
        let g4 = (&(&g1 * &g1) * u2).scale(0.5).integral_from(t0);
        PolyLift { g: [g1, g2, g3, g4] }
    }

    pub(crate) fn eval(&self, t: f64) -> Coords {
        [
            self.g[0].eval(t),
            self.g[1].eval(t),
            self.g[2].eval(t),
            self.g[3].eval(t),
        ]
    }
}

/// Lifts planar controls to a horizontal curve starting at `start`
/// (second-kind coordinates) at the left end of the control domain.
///
/// The lift solves `γ̇1 = u1`, `γ̇2 = u2`, `γ̇3 = γ1 u2`, `γ̇4 = γ1² u2 / 2`.
/// Polynomial controls use exact antiderivatives. Sampled controls are
/// integrated exactly cell by cell over the merged breakpoints, since the
/// integrands are polynomial between consecutive samples.
pub fn lift(controls: &Controls, start: &Coords, grid: &[f64]) -> Result<SampledCurve> {
    check_grid(grid)?;
    controls.validate()?;
    if start.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("start point is not finite".into()));
    }
    let (t0, t1) = controls.domain();
    let slack = 1e-12 * (1.0 + t0.abs().max(t1.abs()));
    if grid[0] < t0 - slack || grid[grid.len() - 1] > t1 + slack {
        return Err(Error::InvalidGrid(format!(
            "grid [{}, {}] leaves the control domain [{t0}, {t1}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let points = match controls {
        Controls::Polynomial { u1, u2, .. } => {
            let g = PolyLift::new(u1, u2, t0);
            grid.iter().map(|&t| engel::mul_second(start, &g.eval(t))).collect()
        }
        Controls::Sampled { times, .. } => {
            let mut merged: Vec<f64> = times.iter().chain(grid.iter()).copied().collect();
            merged.sort_by(f64::total_cmp);
            merged.dedup();
            let mut points = Vec::with_capacity(grid.len());
            let mut x = *start;
            let mut k = 0;
            let mut prev = t0;
            for &s in &merged {
                if s > prev {
                    let (ua, ub) = (controls.eval(prev), controls.eval(s));
                    let h = s - prev;
                    let q = [(ub[0] - ua[0]) / h, (ub[1] - ua[1]) / h];
                    x = engel::mul_second(&x, &linear_piece(h, ua, q));
                    prev = s;
                }
                while k < grid.len() && grid[k] <= s {
                    points.push(x);
                    k += 1;
                }
            }
            while points.len() < grid.len() {
                points.push(x);
            }
            points
        }
    };
    let derivs = grid.iter().map(|&t| controls.eval(t)).collect();
    SampledCurve::new(grid.to_vec(), points, Some(derivs))
}

/// Lifts on `n` uniformly spaced points of the control domain.
pub fn lift_uniform(controls: &Controls, start: &Coords, n: usize) -> Result<SampledCurve> {
    let (t0, t1) = controls.domain();
    lift(controls, start, &uniform_grid(t0, t1, n))
}
