//! Dense univariate polynomials with real coefficients.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Coefficients in ascending order: `c[0] + c[1] t + c[2] t^2 + ...`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    /// Antiderivative vanishing at `t0`.
    pub fn integral_from(&self, t0: f64) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend(self.0.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        let mut p = Poly(out);
        p.0[0] = -p.eval(t0);
        p
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Upper bound on `sup |p'|` over `[t0, t1]` from the coefficient magnitudes.
    pub fn derivative_bound(&self, t0: f64, t1: f64) -> f64 {
        let r = t0.abs().max(t1.abs());
        self.derivative()
            .0
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * r.powi(k as i32))
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly(
            (0..n)
                .map(|k| self.0.get(k).copied().unwrap_or(0.0) + rhs.0.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_calculus() {
        let p = Poly::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.derivative(), Poly::new(vec![-2.0, 6.0]));
        let q = p.integral_from(1.0);
        assert_eq!(q.eval(1.0), 0.0);
        // ∫_1^2 (1 - 2t + 3t^2) dt = 1 - 3 + 7 = 5
        assert!((q.eval(2.0) - 5.0).abs() < 1e-15);
        assert_eq!(Poly::zero().eval(3.0), 0.0);
        assert_eq!(Poly::new(vec![1.0, 0.0, 0.0]).degree(), Some(0));
    }

    #[test]
    fn arithmetic() {
        let p = Poly::new(vec![1.0, 1.0]);
        let q = Poly::new(vec![-1.0, 1.0]);
        assert_eq!(&p * &q, Poly::new(vec![-1.0, 0.0, 1.0]));
        assert_eq!(&p + &q, Poly::new(vec![0.0, 2.0]));
        assert_eq!(&p - &q, Poly::new(vec![2.0, 0.0]));
    }
}
