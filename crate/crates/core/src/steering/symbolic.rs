//! Exact endpoint polynomials of the extended steering family.
//!
//! With `u1 = a + c1 t + c2 t²` and `u2 = b + d1 t + d2 t² + d3 t³ + d4 t⁴`,
//! every coordinate of `γ(1)` and of `γ'(1)` is a polynomial with rational
//! coefficients in `(a, b, c1, c2, d1, d2, d3, d4)`. They are built once by
//! exact integration in `t` and compiled for fast `f64` and exact evaluation.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, ToPrimitive, Zero};

/// Number of parameters: `a, b, c1, c2, d1, d2, d3, d4`.
pub const NP: usize = 8;
pub const A: usize = 0;
pub const B: usize = 1;
pub const C1: usize = 2;
pub const C2: usize = 3;
pub const D1: usize = 4;

/// Index 0 is `t`, then the parameters.
const NV: usize = NP + 1;

type Exps = [u8; NV];

#[derive(Clone, Debug, Default)]
struct MPoly(BTreeMap<Exps, Rational64>);

impl MPoly {
    fn var(v: usize) -> Self {
        Self::monomial(v, 0, 1)
    }

    /// `var · t^tpow`; `var == 0` gives `t^(tpow+1)`.
    fn monomial(v: usize, tpow: u8, coef: i64) -> Self {
        let mut e = [0; NV];
        e[v] += 1;
        e[0] += tpow;
        let mut m = BTreeMap::new();
        m.insert(e, Rational64::from_integer(coef));
        MPoly(m)
    }

    fn add(&self, o: &MPoly) -> MPoly {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            let s = *m.get(e).unwrap_or(&Rational64::zero()) + c;
            if s.is_zero() {
                m.remove(e);
            } else {
                m.insert(*e, s);
            }
        }
        MPoly(m)
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::default();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let mut e = [0; NV];
                for k in 0..NV {
                    e[k] = e1[k] + e2[k];
                }
                out = out.add(&MPoly(BTreeMap::from([(e, c1 * c2)])));
            }
        }
        out
    }

    fn scale(&self, s: Rational64) -> MPoly {
        MPoly(self.0.iter().map(|(e, c)| (*e, c * s)).collect())
    }

    /// `∫_0^t` in the time variable.
    fn integrate_t(&self) -> MPoly {
        MPoly(
            self.0
                .iter()
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[0] += 1;
                    (e2, c / Rational64::from_integer(e2[0] as i64))
                })
                .collect(),
        )
    }

    fn at_t_one(&self) -> MPoly {
        let mut out = MPoly::default();
        for (e, c) in &self.0 {
            let mut e2 = *e;
            e2[0] = 0;
            out = out.add(&MPoly(BTreeMap::from([(e2, *c)])));
        }
        out
    }

    /// Partial derivative in parameter `p` (0-based among the parameters).
    fn diff(&self, p: usize) -> MPoly {
        let v = p + 1;
        let mut out = MPoly::default();
        for (e, c) in &self.0 {
            if e[v] > 0 {
                let mut e2 = *e;
                e2[v] -= 1;
                out = out.add(&MPoly(BTreeMap::from([(
                    e2,
                    c * Rational64::from_integer(e[v] as i64),
                )])));
            }
        }
        out
    }

    fn compile(&self) -> Compiled {
        let terms = self
            .0
            .iter()
            .map(|(e, c)| {
                debug_assert_eq!(e[0], 0);
                let mut p = [0u8; NP];
                p.copy_from_slice(&e[1..]);
                (p, *c.numer() as f64 / *c.denom() as f64, *c)
            })
            .collect();
        Compiled { terms }
    }
}

/// A polynomial in the eight parameters, ready for evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<([u8; NP], f64, Rational64)>,
}

impl Compiled {
    pub fn eval(&self, x: &[f64; NP]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c, _)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * v.powi(k as i32) })
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[BigRational; NP]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, _, c) in &self.terms {
            let mut term = big(*c);
            for (k, v) in e.iter().zip(x) {
                for _ in 0..*k {
                    term *= v;
                }
            }
            acc += term;
        }
        acc
    }

    /// The rational coefficient of the monomial with exponents `e`.
    pub fn coefficient(&self, e: &[u8; NP]) -> Rational64 {
        self.terms
            .iter()
            .find(|(x, _, _)| x == e)
            .map(|t| t.2)
            .unwrap_or_else(Rational64::zero)
    }
}

pub fn big(c: Rational64) -> BigRational {
    BigRational::from_i64(*c.numer()).expect("integer") / BigRational::from_i64(*c.denom()).expect("integer")
}

pub fn big_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Endpoint model: outputs `γ1(1), γ2(1), γ3(1), γ4(1), u1(1), u2(1)` and their
/// gradients in all eight parameters.
pub struct Model {
    pub out: Vec<Compiled>,
    pub grad: Vec<Vec<Compiled>>,
}

pub fn model() -> &'static Model {
    static MODEL: OnceLock<Model> = OnceLock::new();
    MODEL.get_or_init(build)
}

fn build() -> Model {
    let p = |i: usize| MPoly::var(i + 1);
    let tp = |i: usize, k: u8| MPoly::monomial(i + 1, k, 1);
    let u1 = p(A).add(&tp(C1, 1)).add(&tp(C2, 2));
    let mut u2 = p(B);
    for k in 0..4 {
        u2 = u2.add(&tp(D1 + k, k as u8 + 1));
    }
    let g1 = u1.integrate_t();
    let g2 = u2.integrate_t();
    let g3 = g1.mul(&u2).integrate_t();
    let half = Rational64::new(1, 2);
    let g4 = g1.mul(&g1).mul(&u2).scale(half).integrate_t();
    let outs: Vec<MPoly> = [g1, g2, g3, g4, u1, u2].iter().map(MPoly::at_t_one).collect();
    Model {
        grad: outs
            .iter()
            .map(|f| (0..NP).map(|k| f.diff(k).compile()).collect())
            .collect(),
        out: outs.iter().map(MPoly::compile).collect(),
    }
}
