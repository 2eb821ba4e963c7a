//! Generated curves and fragments shared by the Whitney and acceptance tests.

#![allow(dead_code)]

use engelsteer_core::horizontal::{lift, uniform_grid};
use engelsteer_core::whitney::{CompactSet1D, CurveFragment};
use engelsteer_core::{Controls, Poly, SampledCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid size for fragments and Lusin inputs on `[0, 1]`.
pub const GRID: usize = 2001;

/// Random polynomial controls on `[0, 1]` with `|u1| >= 1/2`.
pub fn transversal_controls(rng: &mut impl Rng) -> Controls {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let c0 = sign * rng.gen_range(0.75..1.5);
    let c1 = rng.gen_range(-0.125..0.125);
    let c2 = rng.gen_range(-0.125..0.125);
    let u2: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Controls::polynomial(Poly::new(vec![c0, c1, c2]), Poly::new(u2), 0.0, 1.0)
}

/// `m` disjoint intervals covering roughly 60% of `[0, 1]`, endpoints on the grid.
pub fn random_compact(rng: &mut impl Rng, m: usize, grid: &[f64]) -> CompactSet1D {
    let n = grid.len() - 1;
    // alternate interval and gap lengths, gaps shorter on average
    let w: Vec<f64> = (0..2 * m - 1)
        .map(|k| {
            if k % 2 == 0 {
                rng.gen_range(1.0..2.0)
            } else {
                rng.gen_range(0.4..1.2)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    let mut cuts = vec![0usize];
    let mut acc = 0.0;
    for wk in &w[..w.len() - 1] {
        acc += wk;
        cuts.push(((acc / total) * n as f64).round() as usize);
    }
    cuts.push(n);
    let intervals = (0..m).map(|k| (grid[cuts[2 * k]], grid[cuts[2 * k + 1]])).collect();
    CompactSet1D::new(intervals).expect("generated intervals are disjoint")
}

/// Twenty fragments with 2 to 10 intervals each.
pub fn fragment_corpus(seed: u64) -> Vec<(SampledCurve, CurveFragment)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = uniform_grid(0.0, 1.0, GRID);
    (0..20)
        .map(|i| {
            let c = transversal_controls(&mut rng);
            let start: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let g = lift(&c, &start, &grid).unwrap();
            let k = random_compact(&mut rng, 2 + i % 9, &grid);
            let f = CurveFragment::restrict(&g, &k).unwrap();
            (g, f)
        })
        .collect()
}

fn sampled(f: impl Fn(f64) -> [f64; 2]) -> Controls {
    let t = uniform_grid(0.0, 1.0, GRID);
    let (u1, u2) = t.iter().map(|&s| f(s)).map(|u| (u[0], u[1])).unzip();
    Controls::sampled(t, u1, u2).unwrap()
}

/// A named Lusin input with the measure of `S` known by construction.
pub struct LusinCase {
    pub name: &'static str,
    pub curve: SampledCurve,
    pub measure_s: f64,
}

fn case(name: &'static str, c: Controls, measure_s: f64) -> LusinCase {
    let curve = lift(&c, &[0.0; 4], &uniform_grid(0.0, 1.0, GRID)).unwrap();
    LusinCase { name, curve, measure_s }
}

/// Test families for the Lusin pipeline on `[0, 1]`.
pub fn lusin_families() -> Vec<LusinCase> {
    vec![
        case(
            "smooth_u1_one",
            Controls::polynomial(Poly::constant(1.0), Poly::new(vec![0.2, -1.0, 0.5]), 0.0, 1.0),
            1.0,
        ),
        case(
            "half_transversal",
            sampled(|t| [if t <= 0.5 { 1.0 } else { 0.0 }, (3.0 * t).cos()]),
            0.5,
        ),
        case(
            "vertical_only",
            Controls::polynomial(Poly::zero(), Poly::new(vec![0.0, 2.0]), 0.0, 1.0),
            0.0,
        ),
        // control with jumps and sign changes, plus a vertical stretch
        case(
            "switching",
            sampled(|t| {
                let u1 = if t < 0.2 {
                    1.0
                } else if t < 0.45 {
                    -0.8
                } else if t < 0.6 {
                    0.0
                } else {
                    1.5
                };
                [u1, if t < 0.3 { 0.5 } else { -1.0 }]
            }),
            0.85,
        ),
        // u1 crosses zero transversally at t = 0.3
        case(
            "zero_crossing",
            Controls::polynomial(Poly::new(vec![-0.3, 1.0]), Poly::new(vec![1.0, 0.5]), 0.0, 1.0),
            1.0,
        ),
        // vertical curve whose second coordinate has a corner at t = 0.4
        case(
            "vertical_switching",
            sampled(|t| [0.0, if t < 0.4 { 1.0 } else { -2.0 }]),
            0.0,
        ),
        // many short vertical windows
        case(
            "comb",
            sampled(|t| [if (t * 10.0).fract() < 0.7 { 1.0 } else { 0.0 }, (5.0 * t).sin()]),
            0.7,
        ),
    ]
}
