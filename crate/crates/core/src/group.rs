//! Carnot group arithmetic in exponential coordinates of the first and
//! second kind.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraVector, StratifiedAlgebra};
use crate::engel::{self, Coords};
use crate::error::{Error, Result};

/// Which exponential chart a coordinate vector refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoordKind {
    /// `exp(x_1 X_1 + ... + x_n X_n)`
    #[serde(rename = "first")]
    FirstExp,
    /// `exp(x_n X_n) ... exp(x_1 X_1)`
    #[serde(rename = "second")]
    SecondExp,
}

/// A group element in a tagged coordinate system.
///
/// Serializes as `{"kind":"second","coords":[...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint {
    pub kind: CoordKind,
    pub coords: Vec<f64>,
}

impl GroupPoint {
    pub fn new(kind: CoordKind, coords: Vec<f64>) -> Self {
        GroupPoint { kind, coords }
    }

    pub fn first(coords: Vec<f64>) -> Self {
        Self::new(CoordKind::FirstExp, coords)
    }

    pub fn second(coords: Vec<f64>) -> Self {
        Self::new(CoordKind::SecondExp, coords)
    }

    pub fn identity(kind: CoordKind, n: usize) -> Self {
        Self::new(kind, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Fixed-size view for four-dimensional points.
    pub fn to_array(&self) -> Result<Coords> {
        <[f64; 4]>::try_from(self.coords.as_slice()).map_err(|_| Error::DimensionMismatch {
            expected: 4,
            found: self.dim(),
        })
    }

    pub fn from_array(kind: CoordKind, c: Coords) -> Self {
        Self::new(kind, c.to_vec())
    }
}

/// A Carnot group of step at most three, realised on `R^n` through its
/// stratified Lie algebra.
///
/// First-kind arithmetic works for every algebra (the product is the BCH
/// series of the coordinate vectors). Second-kind arithmetic and chart
/// conversion are implemented for the built-in Engel instance only.
#[derive(Clone, Debug)]
pub struct CarnotGroup {
    algebra: StratifiedAlgebra,
    engel: bool,
}

impl CarnotGroup {
    pub fn new(algebra: StratifiedAlgebra) -> Self {
        let engel = algebra.is_engel();
        CarnotGroup { algebra, engel }
    }

    pub fn engel() -> Self {
        CarnotGroup {
            algebra: StratifiedAlgebra::engel(),
            engel: true,
        }
    }

    pub fn algebra(&self) -> &StratifiedAlgebra {
        &self.algebra
    }

    pub fn is_engel(&self) -> bool {
        self.engel
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn identity(&self, kind: CoordKind) -> GroupPoint {
        GroupPoint::identity(kind, self.dim())
    }

    fn check(&self, x: &GroupPoint) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    fn engel_coords(&self, x: &GroupPoint) -> Result<Coords> {
        if !self.engel {
            return Err(Error::UnsupportedAlgebra);
        }
        x.to_array()
    }

    /// Group product `x y`; both points must use the same chart.
    pub fn mul(&self, x: &GroupPoint, y: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        self.check(y)?;
        if x.kind != y.kind {
            return Err(Error::KindMismatch);
        }
        match x.kind {
            CoordKind::FirstExp => {
                let z = self
                    .algebra
                    .bch(&AlgebraVector(x.coords.clone()), &AlgebraVector(y.coords.clone()))?;
                Ok(GroupPoint::first(z.0))
            }
            CoordKind::SecondExp => {
                let (a, b) = (self.engel_coords(x)?, self.engel_coords(y)?);
                Ok(GroupPoint::from_array(CoordKind::SecondExp, engel::mul_second(&a, &b)))
            }
        }
    }

    /// Group inverse. In the first chart this is coordinate negation.
    pub fn inv(&self, x: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        match x.kind {
            CoordKind::FirstExp => Ok(GroupPoint::first(x.coords.iter().map(|c| -c).collect())),
            CoordKind::SecondExp => {
                let a = self.engel_coords(x)?;
                Ok(GroupPoint::from_array(CoordKind::SecondExp, engel::inv_second(&a)))
            }
        }
    }

    /// Dilation `δ_λ`, scaling coordinate `i` by `λ^{d_i}`.
    ///
    /// Since `δ_λ` is an automorphism mapping `exp(t X_i)` to
    /// `exp(λ^{d_i} t X_i)`, the same scaling applies in both charts.
    pub fn dilate(&self, lambda: f64, x: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidDilation(lambda));
        }
        let coords = x
            .coords
            .iter()
            .zip(self.algebra.homogeneities())
            .map(|(c, &d)| c * lambda.powi(d as i32))
            .collect();
        Ok(GroupPoint::new(x.kind, coords))
    }

    /// Box quasi-norm `max_k |x̂_k|^{1/k}` with unit layer constants,
    /// evaluated in first-kind coordinates.
    pub fn box_norm(&self, x: &GroupPoint) -> Result<f64> {
        let x = self.to_first(x)?;
        let mut norm: f64 = 0.0;
        for k in 1..=self.algebra.step() {
            let layer: f64 = x.coords[self.algebra.layer_range(k)]
                .iter()
                .map(|c| c * c)
                .sum::<f64>()
                .sqrt();
            norm = norm.max(layer.powf(1.0 / k as f64));
        }
        Ok(norm)
    }

    /// Left-invariant box distance `||y^{-1} x||_Box`.
    pub fn box_dist(&self, x: &GroupPoint, y: &GroupPoint) -> Result<f64> {
        let (x, y) = (self.to_first(x)?, self.to_first(y)?);
        self.box_norm(&self.mul(&self.inv(&y)?, &x)?)
    }

    /// Re-expresses a point in first-kind coordinates.
    pub fn to_first(&self, x: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        match x.kind {
            CoordKind::FirstExp => Ok(x.clone()),
            CoordKind::SecondExp => Ok(GroupPoint::from_array(
                CoordKind::FirstExp,
                engel::second_to_first(&self.engel_coords(x)?),
            )),
        }
    }

    /// Re-expresses a point in second-kind coordinates.
    pub fn to_second(&self, x: &GroupPoint) -> Result<GroupPoint> {
        self.check(x)?;
        match x.kind {
            CoordKind::SecondExp => {
                self.engel_coords(x)?;
                Ok(x.clone())
            }
            CoordKind::FirstExp => Ok(GroupPoint::from_array(
                CoordKind::SecondExp,
                engel::first_to_second(&self.engel_coords(x)?),
            )),
        }
    }

    /// `exp(V)` for an algebra vector `V`, in the requested chart.
    pub fn exp(&self, v: &AlgebraVector, kind: CoordKind) -> Result<GroupPoint> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        let p = GroupPoint::first(v.0.clone());
        match kind {
            CoordKind::FirstExp => Ok(p),
            CoordKind::SecondExp => self.to_second(&p),
        }
    }
}

/// `Q(x, y) = xy - x - y` in first-kind coordinates.
pub fn group_law_remainder(g: &CarnotGroup, x: &GroupPoint, y: &GroupPoint) -> Result<Vec<f64>> {
    let (x, y) = (g.to_first(x)?, g.to_first(y)?);
    let xy = g.mul(&x, &y)?;
    Ok(xy
        .coords
        .iter()
        .zip(&x.coords)
        .zip(&y.coords)
        .map(|((p, a), b)| p - a - b)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn second_kind_product_example() {
        let g = CarnotGroup::engel();
        let p = g
            .mul(
                &GroupPoint::second(vec![1.0, 0.0, 0.0, 0.0]),
                &GroupPoint::second(vec![0.0, 1.0, 0.0, 0.0]),
            )
            .unwrap();
        assert_eq!(p.coords, vec![1.0, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn first_kind_inverse_is_negation() {
        let g = CarnotGroup::engel();
        let x = GroupPoint::first(vec![0.3, -0.1, 0.05, 0.7]);
        let xi = g.inv(&x).unwrap();
        assert_eq!(xi.coords, vec![-0.3, 0.1, -0.05, -0.7]);
        let e = g.mul(&x, &xi).unwrap();
        assert!(close(&e.coords, &[0.0; 4], 1e-15));
        assert_eq!(g.inv(&g.identity(CoordKind::FirstExp)).unwrap().coords, vec![0.0; 4]);
    }

    #[test]
    fn second_kind_inverse_via_conversion() {
        let g = CarnotGroup::engel();
        let x = GroupPoint::second(vec![1.0, 1.0, 0.0, 0.0]);
        let xi = g.inv(&x).unwrap();
        let e = g.mul(&x, &xi).unwrap();
        assert!(close(&e.coords, &[0.0; 4], 1e-15));
        // round trip through the first chart, where inversion is negation
        let via = g.to_second(&g.inv(&g.to_first(&x).unwrap()).unwrap()).unwrap();
        assert!(close(&via.coords, &xi.coords, 1e-15));
    }

    #[test]
    fn dilation_examples() {
        let g = CarnotGroup::engel();
        let x = GroupPoint::first(vec![1.0; 4]);
        assert_eq!(g.dilate(2.0, &x).unwrap().coords, vec![2.0, 2.0, 4.0, 8.0]);
        assert_eq!(g.dilate(1.0, &x).unwrap(), x);
        assert_eq!(g.dilate(0.0, &x).unwrap_err(), Error::InvalidDilation(0.0));
        assert!(g.dilate(-1.0, &x).is_err());
    }

    #[test]
    fn box_norm_and_dist() {
        let g = CarnotGroup::engel();
        let x = GroupPoint::first(vec![3.0, 0.0, 4.0, -8.0]);
        assert_eq!(g.box_norm(&x).unwrap(), 3.0);
        assert_eq!(g.box_dist(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn horizontal_exp_in_second_chart() {
        let g = CarnotGroup::engel();
        let (a, b) = (2.0, 3.0);
        let p = g
            .exp(&AlgebraVector(vec![a, b, 0.0, 0.0]), CoordKind::SecondExp)
            .unwrap();
        assert_eq!(p.coords, vec![a, b, a * b / 2.0, a * a * b / 6.0]);
        let zero = g.identity(CoordKind::SecondExp);
        assert_eq!(g.to_first(&zero).unwrap().coords, vec![0.0; 4]);
    }

    #[test]
    fn mismatches_are_errors() {
        let g = CarnotGroup::engel();
        let a = GroupPoint::first(vec![0.0; 4]);
        let b = GroupPoint::second(vec![0.0; 4]);
        assert_eq!(g.mul(&a, &b).unwrap_err(), Error::KindMismatch);
        let h = CarnotGroup::new(StratifiedAlgebra::heisenberg());
        assert_eq!(
            h.to_second(&GroupPoint::first(vec![0.0; 3])).unwrap_err(),
            Error::UnsupportedAlgebra
        );
        assert!(matches!(
            g.mul(&a, &GroupPoint::first(vec![0.0; 3])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn point_json_shape() {
        let p = GroupPoint::second(vec![1.0, 2.0, 3.0, 4.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"second","coords":[1.0,2.0,3.0,4.0]}"#);
        let back: GroupPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
