//! Empirical checks that the direction `X2` is not pliable.
//!
//! If `|γ' - (0, b)| < |b|/2` on `[0, 1]` then `γ̇2` has the sign of `b`, so
//! `γ4(1) = ½ ∫ γ1² γ̇2` has that sign too. The probes below sample that
//! neighborhood and record how close any curve comes to the other sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engel::{self, Coords};
use crate::error::{Error, Result};
use crate::horizontal::PolyLift;
use crate::poly::Poly;

const SUP_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub b: f64,
    pub trials: usize,
    pub seed: u64,
    /// Trials whose `γ4(1)` does not have the sign of `b`.
    pub violations: usize,
    pub min_abs_gamma4: f64,
    /// Largest certified bound on `sup |γ' - (0, b)|` divided by `|b|/2`.
    pub max_sup_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedSearchReport {
    pub b: f64,
    pub target: Coords,
    pub evaluations: usize,
    /// Smallest `|γ4(1) - target4|` found.
    pub best_gap4: f64,
    /// `|target4|`, a lower bound for `best_gap4` when the signs differ.
    pub margin: f64,
    pub best_box_dist: f64,
    pub reached: bool,
}

/// Upper bound on `sup_{[0,1]} |(p1, p2)|` from dense samples plus a
/// Lipschitz allowance for the gaps between them.
fn sup_bound(p1: &Poly, p2: &Poly) -> f64 {
    let h = 1.0 / SUP_SAMPLES as f64;
    let sampled = (0..=SUP_SAMPLES)
        .map(|k| {
            let t = k as f64 * h;
            p1.eval(t).hypot(p2.eval(t))
        })
        .fold(0.0, f64::max);
    let lip = p1.derivative_bound(0.0, 1.0).hypot(p2.derivative_bound(0.0, 1.0));
    sampled + 0.5 * h * lip
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Poly {
    let mut c = vec![0.0];
    c.extend((0..degree).map(|_| rng.gen_range(-1.0..1.0)));
    Poly::new(c)
}

/// `γ(1)` for controls `(p1, b + p2)` from the identity.
fn endpoint(b: f64, p1: &Poly, p2: &Poly) -> Coords {
    let u2 = &Poly::constant(b) + p2;
    PolyLift::new(p1, &u2, 0.0).eval(1.0)
}

fn check_b(b: f64) -> Result<()> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "b must be finite and nonzero, got {b}"
        )));
    }
    Ok(())
}

/// Samples `trials` perturbations of the control `(0, b)` by polynomials of
/// degree at most three vanishing at `t = 0`, scaled so the perturbation stays
/// strictly inside the `|b|/2` ball, and checks the sign of `γ4(1)`.
pub fn x2_obstruction_probe(b: f64, trials: usize, seed: u64) -> Result<ProbeReport> {
    check_b(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 0.5 * b.abs();
    let mut report = ProbeReport {
        b,
        trials,
        seed,
        violations: 0,
        min_abs_gamma4: f64::INFINITY,
        max_sup_ratio: 0.0,
    };
    for _ in 0..trials {
        let (q1, q2) = (random_poly(&mut rng, 3), random_poly(&mut rng, 3));
        let bound = sup_bound(&q1, &q2);
        if bound == 0.0 {
            continue;
        }
        let s = rng.gen_range(0.001..0.999) * radius / bound;
        let (p1, p2) = (q1.scale(s), q2.scale(s));
        report.max_sup_ratio = report.max_sup_ratio.max(sup_bound(&p1, &p2) / radius);
        let g4 = endpoint(b, &p1, &p2)[3];
        if g4 * b.signum() <= 0.0 {
            report.violations += 1;
        }
        report.min_abs_gamma4 = report.min_abs_gamma4.min(g4.abs());
    }
    Ok(report)
}

/// Searches the extended family with `a = 0` inside the `|b|/2` ball for a
/// curve ending at `target`. Random sampling is followed by a shrinking-step
/// local search. The search cannot beat `margin` when `target4` and `b`
/// have opposite signs.
pub fn x2_constrained_search(b: f64, target: &Coords, samples: usize, seed: u64) -> Result<ConstrainedSearchReport> {
    check_b(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 0.5 * b.abs();
    let score = |p1: &Poly, p2: &Poly| {
        let e = endpoint(b, p1, p2);
        ((e[3] - target[3]).abs(), engel::box_dist_second(&e, target))
    };
    let inside = |p1: &Poly, p2: &Poly| sup_bound(p1, p2) < radius;

    let mut best = (Poly::zero(), Poly::zero());
    let mut best_score = score(&best.0, &best.1);
    let mut evaluations = 1;
    for _ in 0..samples {
        let (q1, q2) = (random_poly(&mut rng, 2), random_poly(&mut rng, 4));
        let bound = sup_bound(&q1, &q2);
        if bound == 0.0 {
            continue;
        }
        let s = rng.gen_range(0.001..0.999) * radius / bound;
        let (p1, p2) = (q1.scale(s), q2.scale(s));
        let sc = score(&p1, &p2);
        evaluations += 1;
        if sc.0 < best_score.0 {
            best = (p1, p2);
            best_score = sc;
        }
    }
    let mut step = 0.1 * radius;
    for _ in 0..samples {
        let jitter = |p: &Poly, rng: &mut ChaCha8Rng| {
            let mut c = p.coeffs().to_vec();
            c.resize(5, 0.0);
            for v in c.iter_mut().skip(1) {
                *v += step * rng.gen_range(-1.0..1.0);
            }
            Poly::new(c)
        };
        let (p1, p2) = (jitter(&best.0, &mut rng), jitter(&best.1, &mut rng));
        if !inside(&p1, &p2) {
            step *= 0.95;
            continue;
        }
        let sc = score(&p1, &p2);
        evaluations += 1;
        if sc.0 < best_score.0 {
            best = (p1, p2);
            best_score = sc;
        } else {
            step *= 0.99;
        }
    }
    let margin = target[3].abs();
    Ok(ConstrainedSearchReport {
        b,
        target: *target,
        evaluations,
        best_gap4: best_score.0,
        margin,
        best_box_dist: best_score.1,
        reached: best_score.0 < 1e-10,
    })
}
