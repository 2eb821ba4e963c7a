use serde::{Deserialize, Serialize};

use crate::engel::{Coords, Horizontal};
use crate::error::{Error, Result};
use crate::horizontal::SampledCurve;

/// A finite union of disjoint closed intervals, sorted. Points are allowed
/// as degenerate intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct CompactSet1D {
    intervals: Vec<(f64, f64)>,
}

impl CompactSet1D {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidFragment("compact set is empty".into()));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::InvalidFragment(format!("bad interval [{a}, {b}]")));
            }
        }
        if let Some(w) = intervals.windows(2).find(|w| w[1].0 <= w[0].1) {
            return Err(Error::InvalidFragment(format!(
                "intervals [{}, {}] and [{}, {}] are not disjoint and sorted",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(CompactSet1D { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Bounded components `(b_i, a_{i+1})` of the complement in `[min, max]`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= t && t <= b)
    }

    pub fn is_singleton(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].0 == self.intervals[0].1
    }
}

impl TryFrom<Vec<[f64; 2]>> for CompactSet1D {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<CompactSet1D> for Vec<[f64; 2]> {
    fn from(k: CompactSet1D) -> Self {
        k.intervals.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

/// Whitney data: values `γ` and candidate horizontal derivatives `X`
/// sampled on a compact set `K`.
///
/// Every sample lies in `K` and every interval endpoint of `K` is sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFragment {
    k: CompactSet1D,
    times: Vec<f64>,
    points: Vec<Coords>,
    derivs: Vec<Horizontal>,
}

impl CurveFragment {
    pub fn new(k: CompactSet1D, times: Vec<f64>, points: Vec<Coords>, derivs: Vec<Horizontal>) -> Result<Self> {
        crate::horizontal::check_grid(&times).map_err(|e| Error::InvalidFragment(e.to_string()))?;
        if points.len() != times.len() || derivs.len() != times.len() {
            return Err(Error::InvalidFragment(format!(
                "{} times, {} points, {} derivatives",
                times.len(),
                points.len(),
                derivs.len()
            )));
        }
        if points
            .iter()
            .flatten()
            .chain(derivs.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidFragment("non-finite sample".into()));
        }
        if let Some(t) = times.iter().find(|&&t| !k.contains(t)) {
            return Err(Error::InvalidFragment(format!("sample t = {t} lies outside K")));
        }
        for &(a, b) in k.intervals() {
            for e in [a, b] {
                if times.binary_search_by(|s| s.total_cmp(&e)).is_err() {
                    return Err(Error::InvalidFragment(format!("interval endpoint {e} is not sampled")));
                }
            }
        }
        Ok(CurveFragment {
            k,
            times,
            points,
            derivs,
        })
    }

    /// Restricts a sampled curve with derivatives to the grid points inside
    /// `k`. Each interval is shrunk to the hull of its grid points; intervals
    /// containing no grid point are dropped.
    pub fn restrict(curve: &SampledCurve, k: &CompactSet1D) -> Result<Self> {
        let d = curve.require_derivs()?;
        let mut ivs = Vec::new();
        let (mut times, mut points, mut derivs) = (Vec::new(), Vec::new(), Vec::new());
        for &(a, b) in k.intervals() {
            let idx: Vec<usize> = (0..curve.len())
                .filter(|&i| a <= curve.times()[i] && curve.times()[i] <= b)
                .collect();
            if let (Some(&f), Some(&l)) = (idx.first(), idx.last()) {
                ivs.push((curve.times()[f], curve.times()[l]));
                for i in idx {
                    times.push(curve.times()[i]);
                    points.push(curve.points()[i]);
                    derivs.push(d[i]);
                }
            }
        }
        Self::new(CompactSet1D::new(ivs)?, times, points, derivs)
    }

    pub fn k(&self) -> &CompactSet1D {
        &self.k
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Coords] {
        &self.points
    }

    pub fn derivs(&self) -> &[Horizontal] {
        &self.derivs
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample at time `t`, which must be a sampled time.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.times.binary_search_by(|s| s.total_cmp(&t)).ok()
    }

    /// Smallest horizontal norm of `X` over the samples.
    pub fn min_direction_norm(&self) -> f64 {
        self.derivs
            .iter()
            .map(|u| u[0].hypot(u[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// One sample of the fragment JSON format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FragmentSample {
    pub t: f64,
    pub point: Coords,
    #[serde(rename = "X")]
    pub x: Horizontal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FragmentJson {
    #[serde(rename = "K")]
    k: CompactSet1D,
    samples: Vec<FragmentSample>,
}

impl Serialize for CurveFragment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FragmentJson {
            k: self.k.clone(),
            samples: (0..self.len())
                .map(|i| FragmentSample {
                    t: self.times[i],
                    point: self.points[i],
                    x: self.derivs[i],
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveFragment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut j = FragmentJson::deserialize(d)?;
        j.samples.sort_by(|a, b| a.t.total_cmp(&b.t));
        CurveFragment::new(
            j.k,
            j.samples.iter().map(|s| s.t).collect(),
            j.samples.iter().map(|s| s.point).collect(),
            j.samples.iter().map(|s| s.x).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_set_structure() {
        let k = CompactSet1D::new(vec![(0.0, 0.3), (0.5, 0.5), (0.7, 1.0)]).unwrap();
        assert_eq!(k.gaps(), vec![(0.3, 0.5), (0.5, 0.7)]);
        assert!((k.measure() - 0.6).abs() < 1e-15);
        assert!(k.contains(0.5) && !k.contains(0.4));
        assert!(CompactSet1D::new(vec![(0.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(CompactSet1D::new(vec![]).is_err());
    }

    #[test]
    fn fragment_json_round_trip() {
        let k = CompactSet1D::new(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap();
        let f = CurveFragment::new(
            k,
            vec![0.0, 1.0, 2.0],
            vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]],
            vec![[1.0, 0.0]; 3],
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"K":[[0.0,0.0],[1.0,2.0]],"samples":[{"t":0.0,"point""#));
        let back: CurveFragment = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn fragment_requires_sampled_endpoints() {
        let k = CompactSet1D::interval(0.0, 1.0).unwrap();
        let err = CurveFragment::new(k, vec![0.0], vec![[0.0; 4]], vec![[1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidFragment(_)));
    }
}
