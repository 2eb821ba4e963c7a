//! Lusin-type approximation: a C¹ horizontal curve agreeing with a given
//! horizontal curve on a large set.

use serde::{Deserialize, Serialize};

use super::classical::classical_whitney_1d;
use super::extend::{extend_on, ExtendOptions, ExtensionDiagnostics};
use super::{CompactSet1D, CurveFragment};
use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::horizontal::{arclength_reparam, SampledCurve};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LusinOptions {
    /// Measure that may be given up.
    pub epsilon: f64,
    /// Samples with `|u1| >= tau_dir` form the set `S`.
    pub tau_dir: f64,
    /// Box-distance tolerance for counting a sample as agreeing.
    pub tol: f64,
    pub extend: ExtendOptions,
}

impl Default for LusinOptions {
    fn default() -> Self {
        LusinOptions {
            epsilon: 0.1,
            tau_dir: 1e-9,
            tol: 1e-10,
            extend: ExtendOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LusinRoute {
    Extension,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LusinResult {
    pub route: LusinRoute,
    pub gamma: SampledCurve,
    /// The compact set where `Γ` is built to agree with `γ`; `None` if empty.
    pub k: Option<CompactSet1D>,
    /// Grid measure of `{Γ = γ}`.
    pub agreement: f64,
    /// Grid measure of the selected set (`S`, or everything for the degenerate route).
    pub measure_s: f64,
    /// Grid measure discarded from `S` while selecting `K`.
    pub removed: f64,
    /// Sub-Riemannian length of the input.
    pub length: f64,
    pub attempts: usize,
    pub extension: Option<ExtensionDiagnostics>,
}

/// Voronoi cell lengths of the samples, clipped to the grid hull.
pub(crate) fn cell_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let l = if i == 0 { 0.0 } else { t[i] - t[i - 1] };
            let r = if i == n - 1 { 0.0 } else { t[i + 1] - t[i] };
            0.5 * (l + r)
        })
        .collect()
}

/// Grid measure of `{t : d_Box(γ(t), Γ(t)) <= tol}`.
pub fn measure_agreement(gamma: &SampledCurve, big_gamma: &SampledCurve, tol: f64) -> Result<f64> {
    if gamma.times() != big_gamma.times() {
        return Err(Error::GridMismatch);
    }
    let w = cell_weights(gamma.times());
    Ok(gamma
        .points()
        .iter()
        .zip(big_gamma.points())
        .zip(&w)
        .filter(|((x, y), _)| engel::box_dist_second(x, y) <= tol)
        .map(|(_, w)| w)
        .sum())
}

/// Minimum separation of the runs of `K`, in grid cells. The finest
/// Whitney scale spans 2.5 cells.
const MIN_GAP_CELLS: f64 = 3.0;

/// An isolated increment much larger than both neighbors marks a jump.
fn jumps(v: &[Horizontal]) -> Vec<bool> {
    let d: Vec<f64> = v
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .collect();
    (0..d.len())
        .map(|i| {
            let l = if i > 0 { d[i - 1] } else { 0.0 };
            let r = d.get(i + 1).copied().unwrap_or(0.0);
            d[i] > 1e-6 && d[i] > 10.0 * l.max(r)
        })
        .collect()
}

/// Maximal index runs `[i, j]` (`i < j`) of `mask`, split at jumps.
fn runs(mask: &[bool], jump: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..mask.len() {
        match (start, mask[i]) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
        if let Some(s) = start {
            if i + 1 < mask.len() && jump[i] && mask[i + 1] {
                out.push((s, i));
                start = None;
            }
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len() - 1));
    }
    out.retain(|(i, j)| j > i);
    out
}

fn to_set(t: &[f64], runs: &[(usize, usize)]) -> Option<CompactSet1D> {
    if runs.is_empty() {
        return None;
    }
    CompactSet1D::new(runs.iter().map(|&(i, j)| (t[i], t[j])).collect()).ok()
}

fn run_measure(t: &[f64], r: (usize, usize)) -> f64 {
    t[r.1] - t[r.0]
}

/// Quotient `d(γ_j, γ_i exp((t_j - t_i) X_i)) / |t_j - t_i|` for neighbors
/// inside a run, maximized per sample.
fn local_badness(curve: &SampledCurve, r: (usize, usize)) -> Vec<f64> {
    let (t, p) = (curve.times(), curve.points());
    let x = curve.derivs().expect("checked by caller");
    let q = |i: usize, j: usize| {
        let h = t[j] - t[i];
        let pred = engel::mul_second(&p[i], &engel::exp_horizontal_second(h, &x[i]));
        engel::box_dist_second(&p[j], &pred) / h.abs()
    };
    (r.0..=r.1)
        .map(|i| {
            let mut b: f64 = 0.0;
            for j in [i.wrapping_sub(2), i.wrapping_sub(1), i + 1, i + 2] {
                if j >= r.0 && j <= r.1 && j != i {
                    b = b.max(q(i, j)).max(q(j, i));
                }
            }
            b
        })
        .collect()
}

/// Removes single samples (splitting runs) from the worst local quotient
/// down while the quotient exceeds `threshold` and the budget allows.
fn prune(curve: &SampledCurve, mut rs: Vec<(usize, usize)>, threshold: f64, budget: &mut f64) -> Vec<(usize, usize)> {
    let w = cell_weights(curve.times());
    loop {
        let mut worst: Option<(f64, usize, usize)> = None;
        for (k, &r) in rs.iter().enumerate() {
            for (off, b) in local_badness(curve, r).into_iter().enumerate() {
                if b >= threshold && worst.is_none_or(|w| b > w.0) {
                    worst = Some((b, k, r.0 + off));
                }
            }
        }
        let Some((_, k, i)) = worst else {
            return rs;
        };
        let (a, b) = rs[k];
        let cost = w[i];
        if cost > *budget {
            return rs;
        }
        *budget -= cost;
        rs.remove(k);
        let mut pieces = Vec::new();
        if i > a {
            pieces.push((a, i - 1));
        }
        if i < b {
            pieces.push((i + 1, b));
        }
        pieces.retain(|(x, y)| y > x);
        for (m, p) in pieces.into_iter().enumerate() {
            rs.insert(k + m, p);
        }
    }
}

/// Trims run ends until consecutive runs are at least `min_gap` apart, so
/// that the finest Whitney scale never pairs samples across a jump.
fn separate(t: &[f64], w: &[f64], rs: Vec<(usize, usize)>, min_gap: f64, budget: &mut f64) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(rs.len());
    for mut r in rs {
        if let Some(l) = out.last_mut() {
            let mut left = true;
            while t[r.0] - t[l.1] < min_gap && l.1 > l.0 && r.1 > r.0 {
                if left {
                    *budget -= w[l.1];
                    l.1 -= 1;
                } else {
                    *budget -= w[r.0];
                    r.0 += 1;
                }
                left = !left;
            }
            if l.1 == l.0 {
                *budget -= w[l.0];
                out.pop();
            }
        }
        if r.1 > r.0 {
            out.push(r);
        } else {
            *budget -= w[r.0];
        }
    }
    out
}

/// Widens gap `g` by trimming `k` samples from the left run and `2k` from
/// the right one, `k` a quarter of the gap plus a few cells. The uneven
/// split matters: a gap centred on a symmetric zero crossing of `u1` is a
/// singular point of the six-parameter family. Returns `false` when the runs
/// are too short or the budget does not allow it.
fn widen(w: &[f64], rs: &mut [(usize, usize)], g: usize, budget: &mut f64) -> bool {
    let (l, r) = (rs[g], rs[g + 1]);
    let k = 4 + (r.0 - l.1) / 4;
    if l.1 < l.0 + k || r.0 + 2 * k > r.1 {
        return false;
    }
    let cost: f64 = w[l.1 + 1 - k..=l.1].iter().chain(&w[r.0..r.0 + 2 * k]).sum();
    if cost > *budget {
        return false;
    }
    *budget -= cost;
    rs[g].1 -= k;
    rs[g + 1].0 += 2 * k;
    true
}

/// Constant-velocity curve through the first sample.
fn straight_from_start(curve: &SampledCurve) -> Result<SampledCurve> {
    let d = curve.require_derivs()?;
    let (t0, p0, u0) = (curve.times()[0], curve.start(), d[0]);
    SampledCurve::new(
        curve.times().to_vec(),
        curve
            .times()
            .iter()
            .map(|&t| engel::mul_second(&p0, &engel::exp_horizontal_second(t - t0, &u0)))
            .collect(),
        Some(vec![u0; curve.len()]),
    )
}

/// Approximates a horizontal curve by a C¹ horizontal curve agreeing with
/// it outside a set of measure about `ε` inside `S = {|u1| >= τ_dir}`.
///
/// `K` starts as the runs of `S` on the grid, split where the control jumps
/// and kept a few cells apart. Samples with the worst local difference
/// quotients are then removed within a budget of `ε/2`. If a gap cannot be
/// steered it is widened while the remaining budget allows, and otherwise
/// the shorter neighboring interval is dropped. The total removal budget is
/// `0.9 ε`.
pub fn lusin_approximate(curve: &SampledCurve, opts: &LusinOptions) -> Result<LusinResult> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            opts.epsilon
        )));
    }
    let d = curve.require_derivs()?;
    let t = curve.times();
    let w = cell_weights(t);
    let in_s: Vec<bool> = d.iter().map(|u| u[0].abs() >= opts.tau_dir).collect();
    let measure_s: f64 = in_s.iter().zip(&w).filter(|(s, _)| **s).map(|(_, w)| w).sum();
    if !in_s.iter().any(|&s| s) {
        return Err(Error::EmptyS);
    }
    let (_, arclength) = arclength_reparam(curve)?;
    let length = arclength.values.last().copied().unwrap_or(0.0);

    // half the budget for the quotient-driven pruning, the rest for gaps
    let mut budget = 0.9 * opts.epsilon;
    let mut rs = runs(&in_s, &jumps(d));
    let h_max = t.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
    rs = separate(t, &w, rs, MIN_GAP_CELLS * h_max, &mut budget);
    let min_norm = rs
        .iter()
        .flat_map(|&(i, j)| i..=j)
        .map(|i| d[i][0].hypot(d[i][1]))
        .fold(f64::INFINITY, f64::min);
    let mut prune_budget = budget.min(0.5 * opts.epsilon);
    let before = prune_budget;
    rs = prune(
        curve,
        rs,
        opts.extend.admissibility_factor * min_norm,
        &mut prune_budget,
    );
    budget -= before - prune_budget;

    let mut attempts = 0;
    loop {
        attempts += 1;
        let Some(k) = to_set(t, &rs) else {
            let gamma = straight_from_start(curve)?;
            let agreement = measure_agreement(curve, &gamma, opts.tol)?;
            return Ok(LusinResult {
                route: LusinRoute::Extension,
                gamma,
                k: None,
                agreement,
                measure_s,
                removed: measure_s,
                length,
                attempts,
                extension: None,
            });
        };
        let frag = CurveFragment::restrict(curve, &k)?;
        match extend_on(&frag, Some(t), &opts.extend) {
            Ok(res) => {
                let agreement = measure_agreement(curve, &res.gamma, opts.tol)?;
                let kept: f64 = rs.iter().flat_map(|&(i, j)| i..=j).map(|i| w[i]).sum();
                return Ok(LusinResult {
                    route: LusinRoute::Extension,
                    gamma: res.gamma,
                    k: Some(k),
                    agreement,
                    measure_s,
                    removed: (measure_s - kept).max(0.0),
                    length,
                    attempts,
                    extension: Some(res.diagnostics),
                });
            }
            Err(Error::SteeringFailed { gap, .. }) => {
                if widen(&w, &mut rs, gap, &mut budget) {
                    continue;
                }
                let (l, r) = (rs[gap], rs[gap + 1]);
                let drop = if run_measure(t, l) <= run_measure(t, r) {
                    gap
                } else {
                    gap + 1
                };
                rs.remove(drop);
            }
            Err(Error::NotAdmissible(_)) if rs.len() > 1 => {
                // keep only the largest run, which needs no steering
                let best = *rs
                    .iter()
                    .max_by(|a, b| run_measure(t, **a).total_cmp(&run_measure(t, **b)))
                    .expect("nonempty");
                rs = vec![best];
            }
            Err(e) => return Err(e),
        }
    }
}

/// Handles curves whose velocity stays in `span(X2)`: `γ = p (0, f, 0, 0)`
/// with `p = γ(t0)`. The scalar `f` is extended by the classical C¹ Whitney
/// construction from the runs of the grid between jumps of `u2`, and
/// `Γ = p (0, W, 0, 0)` with the samples of `K` copied verbatim.
pub fn lusin_degenerate(curve: &SampledCurve, opts: &LusinOptions) -> Result<LusinResult> {
    let d = curve.require_derivs()?;
    let t = curve.times();
    if let Some(i) = d.iter().position(|u| u[0].abs() >= opts.tau_dir) {
        return Err(Error::NotDegenerate { t: t[i], u1: d[i][0] });
    }
    let p0 = curve.start();
    let ip0 = engel::inv_second(&p0);
    let f: Vec<f64> = curve.points().iter().map(|x| engel::mul_second(&ip0, x)[1]).collect();
    let fp: Vec<f64> = d.iter().map(|u| u[1]).collect();
    let w = cell_weights(t);
    let measure_s: f64 = w.iter().sum();
    let length = arclength_reparam(curve)?.1.values.last().copied().unwrap_or(0.0);

    let all = vec![true; t.len()];
    let scalar: Vec<Horizontal> = fp.iter().map(|&v| [0.0, v]).collect();
    let rs = runs(&all, &jumps(&scalar));
    let Some(k) = to_set(t, &rs) else {
        let gamma = straight_from_start(curve)?;
        let agreement = measure_agreement(curve, &gamma, opts.tol)?;
        return Ok(LusinResult {
            route: LusinRoute::Degenerate,
            gamma,
            k: None,
            agreement,
            measure_s,
            removed: measure_s,
            length,
            attempts: 1,
            extension: None,
        });
    };
    let ext = classical_whitney_1d(&k, t, &f, &fp, f64::INFINITY)?;
    let points: Vec<Coords> = (0..t.len())
        .map(|i| {
            if k.contains(t[i]) {
                curve.points()[i]
            } else {
                engel::mul_second(&p0, &[0.0, ext.values[i], 0.0, 0.0])
            }
        })
        .collect();
    let derivs: Vec<Horizontal> = (0..t.len())
        .map(|i| if k.contains(t[i]) { d[i] } else { [0.0, ext.derivs[i]] })
        .collect();
    let gamma = SampledCurve::new(t.to_vec(), points, Some(derivs))?;
    let agreement = measure_agreement(curve, &gamma, opts.tol)?;
    let kept: f64 = rs.iter().flat_map(|&(i, j)| i..=j).map(|i| w[i]).sum();
    Ok(LusinResult {
        route: LusinRoute::Degenerate,
        gamma,
        k: Some(k),
        agreement,
        measure_s,
        removed: (measure_s - kept).max(0.0),
        length,
        attempts: 1,
        extension: None,
    })
}

/// Runs [`lusin_approximate`], falling back to [`lusin_degenerate`] when `S`
/// is empty.
pub fn lusin(curve: &SampledCurve, opts: &LusinOptions) -> Result<LusinResult> {
    match lusin_approximate(curve, opts) {
        Err(Error::EmptyS) => lusin_degenerate(curve, opts),
        r => r,
    }
}
