//! Damped Newton shooting with exact residual refinement.
//!
//! The boundary residual measures the endpoint error with the box distance,
//! which takes a cube root of the `x4` error. Plain `f64` Newton therefore
//! stalls near `1e-6`. After the `f64` phase the parameters are kept as an
//! unevaluated sum of `f64` parts, the boundary map is evaluated exactly in
//! rationals, and the correction is solved with the `f64` Jacobian.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::symbolic::{big_f64, model, to_f64, NP};
use super::{embed, ExtendedSteeringFamily, SteeringFamily, FULL_UNKNOWNS, POSITION_UNKNOWNS};
use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::horizontal::{lift, uniform_grid, SampledCurve};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteerOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub a_min: f64,
    /// Number of samples of the returned curve on `[0, 1]`.
    pub grid: usize,
}

impl Default for SteerOptions {
    fn default() -> Self {
        SteerOptions {
            tol: 1e-10,
            max_iter: 50,
            a_min: 1e-6,
            grid: 1001,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Position(SteeringFamily),
    Full(ExtendedSteeringFamily),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringSolution {
    pub family: Family,
    /// Low-order part of the parameters. `params` is the nearest `f64` to the
    /// solved parameters and `params + params_lo` carries them to about 32 digits.
    pub params_lo: Vec<f64>,
    /// `d_Box(γ(1), target) + |γ'(1) - end_deriv|`, evaluated exactly.
    pub residual: f64,
    pub iterations: usize,
    pub curve: SampledCurve,
}

impl SteeringSolution {
    pub fn a(&self) -> f64 {
        match &self.family {
            Family::Position(f) => f.a,
            Family::Full(f) => f.a,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match &self.family {
            Family::Position(f) => f.params.to_vec(),
            Family::Full(f) => f.params.to_vec(),
        }
    }

    pub fn curve_at(&self, s: f64) -> Coords {
        match &self.family {
            Family::Position(f) => f.curve_at(s),
            Family::Full(f) => f.curve_at(s),
        }
    }

    pub fn deriv_at(&self, s: f64) -> Horizontal {
        match &self.family {
            Family::Position(f) => f.controls().eval(s),
            Family::Full(f) => f.deriv_at(s),
        }
    }
}

struct System<'a> {
    a: f64,
    b: f64,
    unknowns: &'a [usize],
    target: Vec<f64>,
}

impl System<'_> {
    fn m(&self) -> usize {
        self.unknowns.len()
    }

    fn value(&self, p: &[f64]) -> Vec<f64> {
        let x = embed(self.a, self.b, self.unknowns, p);
        let out = &model().out;
        (0..self.m()).map(|r| out[r].eval(&x) - self.target[r]).collect()
    }

    fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let x = embed(self.a, self.b, self.unknowns, p);
        let g = &model().grad;
        DMatrix::from_fn(self.m(), self.m(), |r, c| g[r][self.unknowns[c]].eval(&x))
    }

    fn exact_outputs(&self, parts: &[Vec<f64>]) -> Vec<BigRational> {
        let mut x: [BigRational; NP] = embed(self.a, self.b, &[], &[]).map(big_f64);
        for part in parts {
            for (&k, &v) in self.unknowns.iter().zip(part) {
                x[k] += big_f64(v);
            }
        }
        (0..self.m()).map(|r| model().out[r].eval_exact(&x)).collect()
    }

    /// Exact boundary residual together with the rounded coordinate errors.
    fn exact_residual(&self, parts: &[Vec<f64>]) -> (f64, Vec<f64>) {
        let e = self.exact_outputs(parts);
        let t: Vec<BigRational> = self.target.iter().map(|&v| big_f64(v)).collect();
        let diff: Vec<f64> = e.iter().zip(&t).map(|(x, y)| to_f64(&(x - y))).collect();
        let rel = relative_exact(&t[..4], &e[..4]);
        let mut r = engel::box_norm_first(&engel::second_to_first(&rel));
        if self.m() == 6 {
            r += diff[4].hypot(diff[5]);
        }
        (r, diff)
    }
}

/// `y⁻¹ x` in second-kind coordinates, computed exactly and rounded.
fn relative_exact(y: &[BigRational], x: &[BigRational]) -> Coords {
    let half = BigRational::new(1.into(), 2.into());
    let iy = [
        -y[0].clone(),
        -y[1].clone(),
        -&y[2] + &y[0] * &y[1],
        -&y[3] + &y[0] * &y[2] - &half * &y[0] * &y[0] * &y[1],
    ];
    let p = [
        &iy[0] + &x[0],
        &iy[1] + &x[1],
        &iy[2] + &x[2] + &iy[0] * &x[1],
        &iy[3] + &x[3] + &iy[0] * &x[2] + &half * &iy[0] * &iy[0] * &x[1],
    ];
    p.map(|v| to_f64(&v))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve_linear(j: DMatrix<f64>, r: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(r);
    let dp = j.lu().solve(&rhs)?;
    dp.iter()
        .all(|v| v.is_finite())
        .then(|| dp.iter().map(|v| -v).collect())
}

const MAX_HALVINGS: usize = 30;

/// Damped Newton in `f64`. Returns the final merit.
fn newton_f64(sys: &System, p: &mut [f64], budget: usize, iters: &mut usize) -> f64 {
    let mut r = sys.value(p);
    let mut merit = norm(&r);
    let floor = 4.0 * f64::EPSILON * (1.0 + norm(&sys.target));
    while *iters < budget && merit > floor {
        let Some(dp) = solve_linear(sys.jacobian(p), &r) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = p.iter().zip(&dp).map(|(x, d)| x + lambda * d).collect();
            let rt = sys.value(&trial);
            let mt = norm(&rt);
            if mt < merit {
                p.copy_from_slice(&trial);
                r = rt;
                merit = mt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        *iters += 1;
    }
    merit
}

/// Exact refinement on top of the `f64` solution `p`.
fn refine(sys: &System, p: &[f64], tol: f64, budget: usize, iters: &mut usize) -> (Vec<Vec<f64>>, f64) {
    let mut parts = vec![p.to_vec()];
    let (mut res, mut diff) = sys.exact_residual(&parts);
    let mut best = (parts.clone(), res);
    while res >= tol && *iters < budget {
        let hi: Vec<f64> = (0..sys.m()).map(|k| parts.iter().map(|q| q[k]).sum()).collect();
        let Some(dp) = solve_linear(sys.jacobian(&hi), &diff) else {
            break;
        };
        parts.push(dp);
        *iters += 1;
        (res, diff) = sys.exact_residual(&parts);
        if res < best.1 {
            best = (parts.clone(), res);
        } else {
            break;
        }
    }
    best
}

/// Splits the exact sum of `parts` into the nearest `f64` and a remainder.
fn collapse(parts: &[Vec<f64>], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut hi = vec![0.0; m];
    let mut lo = vec![0.0; m];
    for k in 0..m {
        let mut s = BigRational::from_integer(0.into());
        for q in parts {
            s += big_f64(q[k]);
        }
        hi[k] = to_f64(&s);
        lo[k] = to_f64(&(s - big_f64(hi[k])));
    }
    (hi, lo)
}

/// Starting point matching the equations that are linear in the parameters:
/// `γ1(1)`, `γ2(1)` and, for the extended family, `γ'(1)`.
fn initial_guess(sys: &System) -> Vec<f64> {
    let t = &sys.target;
    if sys.m() == 6 {
        // with u = a + x t + y t², u(1) = e and ∫u = q give x = 6q' - 2p', y = 3p' - 6q'
        let pair = |a: f64, e: f64, q: f64| {
            let (p, q) = (e - a, q - a);
            (6.0 * q - 2.0 * p, 3.0 * p - 6.0 * q)
        };
        let (c1, c2) = pair(sys.a, t[4], t[0]);
        let (d1, d2) = pair(sys.b, t[5], t[1]);
        vec![c1, c2, d1, d2, 0.0, 0.0]
    } else {
        vec![2.0 * (t[0] - sys.a), 2.0 * (t[1] - sys.b), 0.0, 0.0]
    }
}

fn solve(sys: &System, opts: &SteerOptions) -> Result<(Vec<Vec<f64>>, usize, f64)> {
    let m = sys.m();
    let zero = vec![vec![0.0; m]];
    let (r0, _) = sys.exact_residual(&zero);
    if r0 < opts.tol {
        return Ok((zero, 0, r0));
    }
    let guess = initial_guess(sys);
    let mut best: Option<(Vec<Vec<f64>>, usize, f64)> = None;
    // Direct solves first, then continuation from the start's image in 2^k stages.
    let plan = [
        (&guess, 1usize),
        (&zero[0], 1),
        (&guess, 8),
        (&zero[0], 4),
        (&zero[0], 16),
        (&zero[0], 64),
    ];
    for (start, stages) in plan {
        let mut iters = 0;
        let mut p = start.clone();
        let base: Vec<f64> = sys.value(&p).iter().zip(&sys.target).map(|(r, t)| r + t).collect();
        let mut ok = true;
        for s in 1..=stages {
            let w = s as f64 / stages as f64;
            let target: Vec<f64> = sys
                .target
                .iter()
                .zip(&base)
                .map(|(t, b0)| if s == stages { *t } else { w * t + (1.0 - w) * b0 })
                .collect();
            let stage = System { target, ..*sys };
            let budget = iters + opts.max_iter;
            let merit = newton_f64(&stage, &mut p, budget, &mut iters);
            if !merit.is_finite() || (s < stages && merit > 1e-8 * (1.0 + norm(&stage.target))) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let budget = iters + opts.max_iter.max(8);
        let (parts, res) = refine(sys, &p, opts.tol, budget, &mut iters);
        if res < opts.tol {
            return Ok((parts, iters, res));
        }
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((parts, iters, res));
        }
    }
    let (_, iterations, residual) = best.unwrap_or((zero, opts.max_iter, r0));
    Err(Error::NoConvergence { iterations, residual })
}

fn check_direction(a: f64, b: f64, opts: &SteerOptions) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("direction is not finite".into()));
    }
    if a.abs() <= opts.a_min {
        return Err(Error::SingularDirection { a, b });
    }
    Ok(())
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} is not finite")))
    }
}

/// Solves `F(c, d1, d2, d3) = target` for the family starting at `(0, (a, b))`.
pub fn steer_position(a: f64, b: f64, target: &Coords, opts: &SteerOptions) -> Result<SteeringSolution> {
    check_direction(a, b, opts)?;
    check_finite(target, "target")?;
    let sys = System {
        a,
        b,
        unknowns: &POSITION_UNKNOWNS,
        target: target.to_vec(),
    };
    let (parts, iterations, residual) = solve(&sys, opts)?;
    let (hi, lo) = collapse(&parts, 4);
    let fam = SteeringFamily::new(a, b, [hi[0], hi[1], hi[2], hi[3]]);
    let curve = lift(&fam.controls(), &[0.0; 4], &uniform_grid(0.0, 1.0, opts.grid.max(2)))?;
    Ok(SteeringSolution {
        family: Family::Position(fam),
        params_lo: lo,
        residual,
        iterations,
        curve,
    })
}

/// Solves for the extended family reaching `target` with derivative `end_deriv`.
pub fn steer_full(
    a: f64,
    b: f64,
    end_deriv: &Horizontal,
    target: &Coords,
    opts: &SteerOptions,
) -> Result<SteeringSolution> {
    check_direction(a, b, opts)?;
    check_finite(target, "target")?;
    check_finite(end_deriv, "end derivative")?;
    let mut t = target.to_vec();
    t.extend_from_slice(end_deriv);
    let sys = System {
        a,
        b,
        unknowns: &FULL_UNKNOWNS,
        target: t,
    };
    let (parts, iterations, residual) = solve(&sys, opts)?;
    let (hi, lo) = collapse(&parts, 6);
    let fam = ExtendedSteeringFamily::new(a, b, [hi[0], hi[1], hi[2], hi[3], hi[4], hi[5]]);
    let curve = lift(&fam.controls(), &[0.0; 4], &uniform_grid(0.0, 1.0, opts.grid.max(2)))?;
    Ok(SteeringSolution {
        family: Family::Full(fam),
        params_lo: lo,
        residual,
        iterations,
        curve,
    })
}
