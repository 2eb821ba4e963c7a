//! Stratified Lie algebras of step at most three, given by structure
//! constants in a basis adapted to the stratification.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported nilpotency step.
pub const MAX_STEP: usize = 3;

const STRUCTURE_TOL: f64 = 1e-12;

/// A vector of the Lie algebra in the adapted basis `X_1, ..., X_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgebraVector(pub Vec<f64>);

impl AlgebraVector {
    pub fn zeros(n: usize) -> Self {
        AlgebraVector(vec![0.0; n])
    }

    /// The basis vector `X_i` (1-based, as in the usual notation).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i - 1] = 1.0;
        AlgebraVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// True when all coefficients beyond the first `rank` indices vanish.
    pub fn is_horizontal(&self, rank: usize) -> bool {
        self.0.iter().skip(rank).all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for AlgebraVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        self.scale(-1.0)
    }
}

impl Mul<&AlgebraVector> for f64 {
    type Output = AlgebraVector;
    fn mul(self, rhs: &AlgebraVector) -> AlgebraVector {
        rhs.scale(self)
    }
}

/// A nilpotent stratified Lie algebra `g = g_1 ⊕ ... ⊕ g_s` with `s <= 3`.
///
/// Structure constants are stored densely: `[X_i, X_j] = Σ_k c[i][j][k] X_k`.
#[derive(Clone, PartialEq)]
pub struct StratifiedAlgebra {
    layer_dims: Vec<usize>,
    degrees: Vec<usize>,
    consts: Vec<f64>,
}

impl fmt::Debug for StratifiedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StratifiedAlgebra")
            .field("layer_dims", &self.layer_dims)
            .field("brackets", &self.nonzero_brackets())
            .finish()
    }
}

impl StratifiedAlgebra {
    /// Builds an algebra from a dense structure-constant table, checking
    /// antisymmetry, grading, stratification and the Jacobi identity.
    pub fn from_structure_constants(layer_dims: Vec<usize>, consts: Vec<f64>) -> Result<Self> {
        if layer_dims.is_empty() || layer_dims.contains(&0) {
            return Err(Error::InvalidAlgebra("layer dimensions must be positive".into()));
        }
        if layer_dims.len() > MAX_STEP {
            return Err(Error::StepTooLarge(layer_dims.len()));
        }
        let n: usize = layer_dims.iter().sum();
        if consts.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: consts.len(),
            });
        }
        if consts.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidAlgebra("non-finite structure constant".into()));
        }
        let degrees = layer_dims
            .iter()
            .enumerate()
            .flat_map(|(layer, &m)| std::iter::repeat_n(layer + 1, m))
            .collect();
        let alg = StratifiedAlgebra {
            layer_dims,
            degrees,
            consts,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra from its nonzero brackets `[X_i, X_j] = Σ out`,
    /// with 1-based indices. Antisymmetric partners are filled in.
    pub fn from_brackets(layer_dims: Vec<usize>, brackets: &[(usize, usize, Vec<(usize, f64)>)]) -> Result<Self> {
        let n: usize = layer_dims.iter().sum();
        let mut consts = vec![0.0; n * n * n];
        for (i, j, out) in brackets {
            for &idx in [*i, *j].iter().chain(out.iter().map(|(k, _)| k)) {
                if idx == 0 || idx > n {
                    return Err(Error::InvalidAlgebra(format!("basis index {idx} out of range 1..={n}")));
                }
            }
            if i == j {
                return Err(Error::InvalidAlgebra(format!("bracket [X{i}, X{i}] must vanish")));
            }
            for &(k, c) in out {
                consts[((i - 1) * n + (j - 1)) * n + (k - 1)] += c;
                consts[((j - 1) * n + (i - 1)) * n + (k - 1)] -= c;
            }
        }
        Self::from_structure_constants(layer_dims, consts)
    }

    /// The Engel algebra: `m = (2, 1, 1)`, `[X1, X2] = X3`, `[X1, X3] = X4`.
    pub fn engel() -> Self {
        Self::from_brackets(vec![2, 1, 1], &[(1, 2, vec![(3, 1.0)]), (1, 3, vec![(4, 1.0)])])
            .expect("Engel structure constants are valid")
    }

    /// The first Heisenberg algebra: `m = (2, 1)`, `[X1, X2] = X3`.
    pub fn heisenberg() -> Self {
        Self::from_brackets(vec![2, 1], &[(1, 2, vec![(3, 1.0)])]).expect("Heisenberg structure constants are valid")
    }

    /// The abelian algebra `R^n`, a step-one Carnot algebra.
    pub fn abelian(n: usize) -> Self {
        Self::from_structure_constants(vec![n], vec![0.0; n * n * n]).expect("abelian algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Dimension `r = m_1` of the horizontal layer.
    pub fn rank(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Homogeneities `d_i`, the layer index of each basis vector.
    pub fn homogeneities(&self) -> &[usize] {
        &self.degrees
    }

    /// 0-based index range of layer `k` (1-based layer number).
    pub fn layer_range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.layer_dims[..k - 1].iter().sum();
        start..start + self.layer_dims[k - 1]
    }

    /// Structure constant `c[i][j][k]` with 0-based indices.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.consts[(i * n + j) * n + k]
    }

    pub fn is_engel(&self) -> bool {
        *self == Self::engel()
    }

    fn nonzero_brackets(&self) -> Vec<(usize, usize, BTreeMap<usize, f64>)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let map: BTreeMap<usize, f64> = (0..n)
                    .filter_map(|k| {
                        let c = self.structure_constant(i, j, k);
                        (c != 0.0).then_some((k + 1, c))
                    })
                    .collect();
                if !map.is_empty() {
                    out.push((i + 1, j + 1, map));
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let s = self.step();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.structure_constant(i, j, k);
                    if (c + self.structure_constant(j, i, k)).abs() > STRUCTURE_TOL {
                        return Err(Error::InvalidAlgebra(format!(
                            "structure constants not antisymmetric at ({}, {}, {})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                    if c != 0.0 && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return Err(Error::InvalidAlgebra(format!(
                            "[X{}, X{}] has a component along X{} outside layer {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            self.degrees[i] + self.degrees[j]
                        )));
                    }
                }
            }
        }
        // g_l = [g_1, g_{l-1}]
        for layer in 2..=s {
            let target = self.layer_range(layer);
            let rows: Vec<Vec<f64>> = self
                .layer_range(1)
                .flat_map(|i| self.layer_range(layer - 1).map(move |j| (i, j)))
                .map(|(i, j)| target.clone().map(|k| self.structure_constant(i, j, k)).collect())
                .collect();
            if numerical_rank(rows) < self.layer_dims[layer - 1] {
                return Err(Error::InvalidAlgebra(format!(
                    "layer {layer} is not generated by brackets with the horizontal layer"
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (
                        AlgebraVector::basis(n, i + 1),
                        AlgebraVector::basis(n, j + 1),
                        AlgebraVector::basis(n, k + 1),
                    );
                    let t1 = self.bracket_unchecked(&x, &self.bracket_unchecked(&y, &z));
                    let t2 = self.bracket_unchecked(&y, &self.bracket_unchecked(&z, &x));
                    let t3 = self.bracket_unchecked(&z, &self.bracket_unchecked(&x, &y));
                    let sum = &(&t1 + &t2) + &t3;
                    if sum.norm_inf() > STRUCTURE_TOL {
                        return Err(Error::InvalidAlgebra(format!(
                            "Jacobi identity fails on (X{}, X{}, X{})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, v: &AlgebraVector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }

    fn bracket_unchecked(&self, a: &AlgebraVector, b: &AlgebraVector) -> AlgebraVector {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                let ab = a[i] * b[j];
                let row = &self.consts[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, c) in out.iter_mut().zip(row) {
                    *o += ab * c;
                }
            }
        }
        AlgebraVector(out)
    }

    /// Lie bracket, expanded bilinearly through the structure constants.
    pub fn bracket(&self, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.bracket_unchecked(a, b))
    }

    /// Baker–Campbell–Hausdorff product `log(exp A exp B)`, truncated at
    /// step three where it is exact:
    /// `A + B + 1/2 [A,B] + 1/12 [A,[A,B]] - 1/12 [B,[A,B]]`.
    pub fn bch(&self, a: &AlgebraVector, b: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let ab = self.bracket_unchecked(a, b);
        let mut z = &(a + b) + &scale_ratio(&ab, Rational64::new(1, 2));
        if self.step() >= 3 {
            let diff = &self.bracket_unchecked(a, &ab) - &self.bracket_unchecked(b, &ab);
            z = &z + &scale_ratio(&diff, Rational64::new(1, 12));
        }
        Ok(z)
    }
}

#[derive(Serialize, Deserialize)]
struct BracketJson {
    i: usize,
    j: usize,
    out: BTreeMap<String, f64>,
}

/// JSON form: `{"layer_dims":[2,1,1],"brackets":[{"i":1,"j":2,"out":{"3":1.0}}]}`.
#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    layer_dims: Vec<usize>,
    brackets: Vec<BracketJson>,
}

impl Serialize for StratifiedAlgebra {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let brackets = self
            .nonzero_brackets()
            .into_iter()
            .map(|(i, j, out)| BracketJson {
                i,
                j,
                out: out.into_iter().map(|(k, c)| (k.to_string(), c)).collect(),
            })
            .collect();
        AlgebraJson {
            layer_dims: self.layer_dims.clone(),
            brackets,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StratifiedAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = AlgebraJson::deserialize(deserializer)?;
        let mut brackets = Vec::with_capacity(raw.brackets.len());
        for b in raw.brackets {
            let mut out = Vec::with_capacity(b.out.len());
            for (k, c) in b.out {
                let k: usize = k
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad basis index {k:?}")))?;
                out.push((k, c));
            }
            brackets.push((b.i, b.j, out));
        }
        StratifiedAlgebra::from_brackets(raw.layer_dims, &brackets).map_err(D::Error::custom)
    }
}

/// Multiplies by `p/q` as `(v * p) / q`, so that `1/12` is applied with a
/// single rounding instead of through the rounded reciprocal.
fn scale_ratio(v: &AlgebraVector, r: Rational64) -> AlgebraVector {
    let (p, q) = (*r.numer() as f64, *r.denom() as f64);
    AlgebraVector(v.0.iter().map(|c| c * p / q).collect())
}

fn numerical_rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= STRUCTURE_TOL {
            continue;
        }
        rows.swap(rank, p);
        for r in rank + 1..rows.len() {
            let f = rows[r][col] / rows[rank][col];
            for c in col..cols {
                rows[r][c] -= f * rows[rank][c];
            }
        }
        rank += 1;
    }
    rank
}
