//! Polynomial steering families in the Engel group and boundary-value solving.

mod gluing;
mod newton;
mod probe;
pub mod symbolic;

pub use gluing::{concat_scaled, preroll};
pub use newton::{steer_full, steer_position, Family, SteerOptions, SteeringSolution};
pub use probe::{x2_constrained_search, x2_obstruction_probe, ConstrainedSearchReport, ProbeReport};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::engel::{Coords, Horizontal};
use crate::horizontal::{Controls, PolyLift};
use crate::poly::Poly;
use symbolic::{big_f64, model, to_f64, A, B, C1, C2, D1, NP};

/// Unknowns of the four-parameter family `(c, d1, d2, d3)` in model order.
pub(crate) const POSITION_UNKNOWNS: [usize; 4] = [C1, D1, D1 + 1, D1 + 2];
/// Unknowns `(c1, c2, d1, d2, d3, d4)` of the extended family.
pub(crate) const FULL_UNKNOWNS: [usize; 6] = [C1, C2, D1, D1 + 1, D1 + 2, D1 + 3];

/// `γ̇1 = a + c t`, `γ̇2 = b + d1 t + d2 t² + d3 t³` on `[0, 1]`, `γ(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringFamily {
    pub a: f64,
    pub b: f64,
    /// `(c, d1, d2, d3)`
    pub params: [f64; 4],
}

/// `γ̇1 = a + c1 t + c2 t²`, `γ̇2 = b + d1 t + d2 t² + d3 t³ + d4 t⁴` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSteeringFamily {
    pub a: f64,
    pub b: f64,
    /// `(c1, c2, d1, d2, d3, d4)`
    pub params: [f64; 6],
}

fn embed(a: f64, b: f64, unknowns: &[usize], p: &[f64]) -> [f64; NP] {
    let mut x = [0.0; NP];
    x[A] = a;
    x[B] = b;
    for (&k, &v) in unknowns.iter().zip(p) {
        x[k] = v;
    }
    x
}

fn controls_of(x: &[f64; NP]) -> Controls {
    Controls::polynomial(
        Poly::new(vec![x[A], x[C1], x[C2]]),
        Poly::new(vec![x[B], x[D1], x[D1 + 1], x[D1 + 2], x[D1 + 3]]),
        0.0,
        1.0,
    )
}

impl SteeringFamily {
    pub fn new(a: f64, b: f64, params: [f64; 4]) -> Self {
        SteeringFamily { a, b, params }
    }

    pub(crate) fn full_params(&self) -> [f64; NP] {
        embed(self.a, self.b, &POSITION_UNKNOWNS, &self.params)
    }

    pub fn controls(&self) -> Controls {
        controls_of(&self.full_params())
    }

    /// `γ(1)` in second-kind coordinates.
    pub fn endpoint(&self) -> Coords {
        let x = self.full_params();
        let m = model();
        [
            m.out[0].eval(&x),
            m.out[1].eval(&x),
            m.out[2].eval(&x),
            m.out[3].eval(&x),
        ]
    }

    /// Exact Jacobian of the endpoint in `(c, d1, d2, d3)`.
    pub fn jacobian(&self) -> [[f64; 4]; 4] {
        let x = self.full_params();
        let m = model();
        let mut j = [[0.0; 4]; 4];
        for (r, row) in j.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m.grad[r][POSITION_UNKNOWNS[c]].eval(&x);
            }
        }
        j
    }

    /// The curve as a function of time, exact up to coefficient rounding.
    pub fn curve_at(&self, s: f64) -> Coords {
        let x = self.full_params();
        lift_fn(&x).eval(s)
    }
}

impl ExtendedSteeringFamily {
    pub fn new(a: f64, b: f64, params: [f64; 6]) -> Self {
        ExtendedSteeringFamily { a, b, params }
    }

    pub(crate) fn full_params(&self) -> [f64; NP] {
        embed(self.a, self.b, &FULL_UNKNOWNS, &self.params)
    }

    pub fn controls(&self) -> Controls {
        controls_of(&self.full_params())
    }

    /// `(γ(1), γ'(1))`.
    pub fn boundary(&self) -> (Coords, Horizontal) {
        let x = self.full_params();
        let m = model();
        let v: Vec<f64> = m.out.iter().map(|f| f.eval(&x)).collect();
        ([v[0], v[1], v[2], v[3]], [v[4], v[5]])
    }

    /// Exact Jacobian of `(γ(1), γ'(1))` in the six parameters.
    pub fn jacobian(&self) -> [[f64; 6]; 6] {
        let x = self.full_params();
        let m = model();
        let mut j = [[0.0; 6]; 6];
        for (r, row) in j.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m.grad[r][FULL_UNKNOWNS[c]].eval(&x);
            }
        }
        j
    }

    pub fn curve_at(&self, s: f64) -> Coords {
        lift_fn(&self.full_params()).eval(s)
    }

    pub fn deriv_at(&self, s: f64) -> Horizontal {
        self.controls().eval(s)
    }
}

pub(crate) fn lift_fn(x: &[f64; NP]) -> PolyLift {
    match controls_of(x) {
        Controls::Polynomial { u1, u2, .. } => PolyLift::new(&u1, &u2, 0.0),
        Controls::Sampled { .. } => unreachable!("steering controls are polynomial"),
    }
}

/// `F(c, d1, d2, d3) = γ(1)`.
pub fn endpoint_map(fam: &SteeringFamily) -> Coords {
    fam.endpoint()
}

/// `dF` at zero parameters, exactly:
/// `[[1/2,0,0,0],[0,1/2,1/3,1/4],[b/6,a/3,a/4,a/5],[ab/8,a²/8,a²/10,a²/12]]`.
pub fn endpoint_jacobian_zero_exact(a: f64, b: f64) -> [[BigRational; 4]; 4] {
    let x: [BigRational; NP] = embed(a, b, &[], &[]).map(big_f64);
    let m = model();
    std::array::from_fn(|r| std::array::from_fn(|c| m.grad[r][POSITION_UNKNOWNS[c]].eval_exact(&x)))
}

pub fn endpoint_jacobian_zero(a: f64, b: f64) -> [[f64; 4]; 4] {
    endpoint_jacobian_zero_exact(a, b).map(|row| row.map(|v| to_f64(&v)))
}

/// Determinant of `dF(0)`, computed in exact arithmetic and rounded once.
pub fn jacobian_zero_determinant(a: f64, b: f64) -> f64 {
    to_f64(&exact_det(endpoint_jacobian_zero_exact(a, b)))
}

fn exact_det<const N: usize>(mut m: [[BigRational; N]; N]) -> BigRational {
    let mut det = BigRational::from_integer(1.into());
    for col in 0..N {
        let Some(piv) = (col..N).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..N {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..N {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}
