use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check::{check_whitney, default_etas, max_spacing, WhitneyTable};
use super::CurveFragment;
use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::horizontal::{horizontality_residual, SampledCurve};
use crate::steering::{steer_full, ExtendedSteeringFamily, Family, SteerOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendOptions {
    pub steer: SteerOptions,
    /// Directions with `|u1| < tau_dir` count as lying in `span(X2)`.
    pub tau_dir: f64,
    /// Admissible when the finest sampled `r_{K,η}` is below this factor
    /// times the smallest direction norm at a gap endpoint.
    pub admissibility_factor: f64,
    /// Sample spacing inside gaps. Defaults to the largest in-interval spacing.
    pub gap_step: Option<f64>,
    /// Scales for the `r_{K,η}` table. Defaults to [`default_etas`].
    pub etas: Option<Vec<f64>>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions {
            steer: SteerOptions::default(),
            tau_dir: 1e-9,
            admissibility_factor: 0.1,
            gap_step: None,
            etas: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub iterations: usize,
    pub residual: f64,
    pub params: [f64; 6],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionDiagnostics {
    pub r_table: WhitneyTable,
    pub threshold: f64,
    pub max_residual: Option<f64>,
    /// Largest gap between one-sided difference derivatives of `Γ` at gap
    /// endpoints and the prescribed `X`.
    pub max_derivative_jump: f64,
    pub per_gap: Vec<GapReport>,
}

#[derive(Clone, Debug, PartialEq)]
struct GapPiece {
    a: f64,
    b: f64,
    origin: Coords,
    fam: ExtendedSteeringFamily,
}

impl GapPiece {
    fn len(&self) -> f64 {
        self.b - self.a
    }

    fn eval(&self, t: f64) -> Coords {
        let s = (t - self.a) / self.len();
        engel::mul_second(&self.origin, &engel::dilate(self.len(), &self.fam.curve_at(s)))
    }

    fn deriv(&self, t: f64) -> Horizontal {
        self.fam.deriv_at((t - self.a) / self.len())
    }
}

/// A C¹ horizontal curve extending a fragment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionResult {
    pub gamma: SampledCurve,
    pub diagnostics: ExtensionDiagnostics,
    frag: CurveFragment,
    gaps: Vec<GapPiece>,
}

impl ExtensionResult {
    /// `Γ(t)` for any `t`. Outside `[min K, max K]` the curve continues with
    /// constant velocity `X(min K)` or `X(max K)`.
    pub fn eval(&self, t: f64) -> Coords {
        let f = &self.frag;
        let (lo, hi) = (f.k().min(), f.k().max());
        let n = f.len();
        if t < lo {
            return engel::mul_second(&f.points()[0], &engel::exp_horizontal_second(t - lo, &f.derivs()[0]));
        }
        if t > hi {
            return engel::mul_second(
                &f.points()[n - 1],
                &engel::exp_horizontal_second(t - hi, &f.derivs()[n - 1]),
            );
        }
        if let Some(g) = self.gap_at(t) {
            return g.eval(t);
        }
        if let Some(i) = f.index_of(t) {
            return f.points()[i];
        }
        let i = f.times().partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (f.times()[i], f.times()[i + 1]);
        let (u0, u1) = (f.derivs()[i], f.derivs()[i + 1]);
        let w = 0.5 * (t - t0) / (t1 - t0);
        let ubar = [u0[0] + w * (u1[0] - u0[0]), u0[1] + w * (u1[1] - u0[1])];
        engel::mul_second(&f.points()[i], &engel::exp_horizontal_second(t - t0, &ubar))
    }

    /// `Γ'(t)` as a horizontal vector.
    pub fn deriv(&self, t: f64) -> Horizontal {
        let f = &self.frag;
        let n = f.len();
        if t <= f.k().min() {
            return f.derivs()[0];
        }
        if t >= f.k().max() {
            return f.derivs()[n - 1];
        }
        if let Some(g) = self.gap_at(t) {
            return g.deriv(t);
        }
        if let Some(i) = f.index_of(t) {
            return f.derivs()[i];
        }
        let i = f.times().partition_point(|&s| s <= t) - 1;
        let w = (t - f.times()[i]) / (f.times()[i + 1] - f.times()[i]);
        let (u0, u1) = (f.derivs()[i], f.derivs()[i + 1]);
        [u0[0] + w * (u1[0] - u0[0]), u0[1] + w * (u1[1] - u0[1])]
    }

    /// Samples `Γ` on `grid`, copying fragment samples verbatim.
    pub fn resample(&self, grid: &[f64]) -> Result<SampledCurve> {
        SampledCurve::new(
            grid.to_vec(),
            grid.iter().map(|&t| self.eval(t)).collect(),
            Some(grid.iter().map(|&t| self.deriv(t)).collect()),
        )
    }

    pub fn fragment(&self) -> &CurveFragment {
        &self.frag
    }

    fn gap_at(&self, t: f64) -> Option<&GapPiece> {
        let i = self.gaps.partition_point(|g| g.b <= t);
        self.gaps.get(i).filter(|g| g.a < t && t < g.b)
    }
}

/// Solves the boundary problem on one gap after normalizing it to `[0, 1]`.
fn solve_gap(frag: &CurveFragment, index: usize, a: f64, b: f64, opts: &SteerOptions) -> Result<(GapPiece, GapReport)> {
    let ia = frag.index_of(a).expect("gap endpoints are sampled");
    let ib = frag.index_of(b).expect("gap endpoints are sampled");
    let (p, q) = (frag.points()[ia], frag.points()[ib]);
    let (xa, xb) = (frag.derivs()[ia], frag.derivs()[ib]);
    let len = b - a;
    let z = engel::dilate(1.0 / len, &engel::mul_second(&engel::inv_second(&p), &q));
    let fail = |reason: String| Error::SteeringFailed {
        gap: index,
        start: a,
        end: b,
        reason,
    };
    let sol = steer_full(xa[0], xa[1], &xb, &z, opts).map_err(|e| fail(e.to_string()))?;
    let Family::Full(fam) = sol.family else {
        return Err(fail("unexpected family".into()));
    };
    Ok((
        GapPiece { a, b, origin: p, fam },
        GapReport {
            index,
            start: a,
            end: b,
            iterations: sol.iterations,
            residual: sol.residual,
            params: fam.params,
        },
    ))
}

/// Fragment times plus evenly spaced interior points of every gap.
fn default_grid(frag: &CurveFragment, step: f64) -> Vec<f64> {
    let mut grid = frag.times().to_vec();
    for (a, b) in frag.k().gaps() {
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        grid.extend((1..n).map(|k| a + (b - a) * k as f64 / n as f64));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Second-order one-sided difference of the horizontal coordinates.
fn one_sided(res: &ExtensionResult, t: f64, h: f64) -> Horizontal {
    let (f0, f1, f2) = (res.eval(t), res.eval(t + h), res.eval(t + 2.0 * h));
    let d = |k: usize| (-3.0 * f0[k] + 4.0 * f1[k] - f2[k]) / (2.0 * h);
    [d(0), d(1)]
}

fn derivative_jumps(res: &ExtensionResult) -> f64 {
    let f = &res.frag;
    let mut worst: f64 = 0.0;
    for (a, b) in f.k().gaps() {
        let h = 1e-4f64.min(0.25 * (b - a));
        for (t, x, dir) in [
            (a, f.derivs()[f.index_of(a).unwrap()], h),
            (b, f.derivs()[f.index_of(b).unwrap()], -h),
        ] {
            let d = one_sided(res, t, dir);
            worst = worst.max((d[0] - x[0]).hypot(d[1] - x[1]));
        }
    }
    worst
}

/// Fills every gap of `K` with a steered horizontal curve matching the
/// fragment's points and derivatives at both ends.
///
/// A gap `(a, b)` is normalized by `z = δ_{1/(b-a)}(γ(a)⁻¹ γ(b))`, solved from
/// `(0, X(a))` to `(z, X(b))` on `[0, 1]`, and mapped back by
/// `Γ(t) = γ(a) δ_{b-a}(γ̃((t - a) / (b - a)))`.
pub fn extend(frag: &CurveFragment, opts: &ExtendOptions) -> Result<ExtensionResult> {
    extend_on(frag, None, opts)
}

/// As [`extend`], sampling `Γ` on `grid` when given.
pub fn extend_on(frag: &CurveFragment, grid: Option<&[f64]>, opts: &ExtendOptions) -> Result<ExtensionResult> {
    if let Some(i) = frag.derivs().iter().position(|u| u[0].abs() < opts.tau_dir) {
        return Err(Error::NotAdmissible(format!(
            "direction enters span(X2) at t = {} (u1 = {:e})",
            frag.times()[i],
            frag.derivs()[i][0]
        )));
    }
    let etas = opts.etas.clone().unwrap_or_else(|| default_etas(frag));
    let table = check_whitney(frag, &etas)?;
    let gaps = frag.k().gaps();
    let threshold = opts.admissibility_factor
        * gaps
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .map(|t| {
                let u = frag.derivs()[frag.index_of(t).unwrap()];
                u[0].hypot(u[1])
            })
            .fold(f64::INFINITY, f64::min);
    if !gaps.is_empty() && table.finest() >= threshold {
        return Err(Error::NotAdmissible(format!(
            "finest sampled r = {:e} is not below {:e}",
            table.finest(),
            threshold
        )));
    }

    let solved: Vec<Result<(GapPiece, GapReport)>> = gaps
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b))| solve_gap(frag, i, a, b, &opts.steer))
        .collect();
    let mut pieces = Vec::with_capacity(gaps.len());
    let mut per_gap = Vec::with_capacity(gaps.len());
    for r in solved {
        let (p, g) = r?;
        pieces.push(p);
        per_gap.push(g);
    }

    let mut res = ExtensionResult {
        gamma: SampledCurve::new(
            vec![frag.times()[0]],
            vec![frag.points()[0]],
            Some(vec![frag.derivs()[0]]),
        )?,
        diagnostics: ExtensionDiagnostics {
            r_table: table,
            threshold,
            max_residual: None,
            max_derivative_jump: 0.0,
            per_gap,
        },
        frag: frag.clone(),
        gaps: pieces,
    };
    let grid = match grid {
        Some(g) => g.to_vec(),
        None => {
            let step = opts.gap_step.or_else(|| max_spacing(frag)).unwrap_or(1e-3);
            default_grid(frag, step)
        }
    };
    res.gamma = res.resample(&grid)?;
    res.diagnostics.max_residual = horizontality_residual(&res.gamma).ok();
    res.diagnostics.max_derivative_jump = derivative_jumps(&res);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horizontal::{c1h_distance, lift, uniform_grid, Controls};
    use crate::poly::Poly;
    use crate::whitney::CompactSet1D;

    fn smooth_curve(n: usize) -> SampledCurve {
        let c = Controls::polynomial(Poly::new(vec![1.0, 0.5]), Poly::new(vec![0.2, 1.0, -1.0]), 0.0, 1.0);
        lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, n)).unwrap()
    }

    #[test]
    fn two_interval_extension_is_exact_on_k() {
        let g = smooth_curve(2001);
        let k = CompactSet1D::new(vec![(0.0, 0.3), (0.7, 1.0)]).unwrap();
        let f = CurveFragment::restrict(&g, &k).unwrap();
        let res = extend(&f, &ExtendOptions::default()).unwrap();
        for (i, &t) in f.times().iter().enumerate() {
            let j = res.gamma.times().iter().position(|&s| s == t).unwrap();
            assert_eq!(res.gamma.points()[j], f.points()[i]);
            assert_eq!(res.gamma.derivs().unwrap()[j], f.derivs()[i]);
        }
        assert!(res.diagnostics.max_residual.unwrap() < 1e-6);
        assert!(res.diagnostics.max_derivative_jump < 1e-3);
        assert_eq!(res.diagnostics.per_gap.len(), 1);
    }

    #[test]
    fn single_interval_is_returned_as_is() {
        let g = smooth_curve(101);
        let k = CompactSet1D::interval(0.0, 1.0).unwrap();
        let f = CurveFragment::restrict(&g, &k).unwrap();
        let res = extend(&f, &ExtendOptions::default()).unwrap();
        assert_eq!(res.gamma, g);
    }

    #[test]
    fn line_gap_stays_close_to_line() {
        let c = Controls::constant([1.0, 0.0], 0.0, 1.0);
        let g = lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, 1001)).unwrap();
        let k = CompactSet1D::new(vec![(0.0, 0.4), (0.6, 1.0)]).unwrap();
        let f = CurveFragment::restrict(&g, &k).unwrap();
        let res = extend(&f, &ExtendOptions::default()).unwrap();
        let line = lift(&c, &[0.0; 4], res.gamma.times()).unwrap();
        assert!(c1h_distance(&res.gamma, &line).unwrap() < 0.1);
    }

    #[test]
    fn vertical_direction_is_not_admissible() {
        let c = Controls::constant([0.0, 1.0], 0.0, 1.0);
        let g = lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, 11)).unwrap();
        let k = CompactSet1D::new(vec![(0.0, 0.3), (0.7, 1.0)]).unwrap();
        let f = CurveFragment::restrict(&g, &k).unwrap();
        assert!(matches!(
            extend(&f, &ExtendOptions::default()),
            Err(Error::NotAdmissible(_))
        ));
    }
}
