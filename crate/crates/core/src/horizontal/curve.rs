use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::engel::{self, Coords, Horizontal};
use crate::error::{Error, Result};
use crate::group::{CoordKind, GroupPoint};

/// A curve in the Engel group sampled on a strictly increasing grid, with
/// points in second-kind coordinates and optional horizontal derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    times: Vec<f64>,
    points: Vec<Coords>,
    derivs: Option<Vec<Horizontal>>,
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid(format!("non-finite time {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "times not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `n` equally spaced times covering `[t0, t1]`, endpoints included exactly.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => {
            let h = (t1 - t0) / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|k| t0 + k as f64 * h).collect();
            g[n - 1] = t1;
            g
        }
    }
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, points: Vec<Coords>, derivs: Option<Vec<Horizontal>>) -> Result<Self> {
        check_grid(&times)?;
        if points.len() != times.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: points.len(),
            });
        }
        if let Some(d) = &derivs {
            if d.len() != times.len() {
                return Err(Error::DimensionMismatch {
                    expected: times.len(),
                    found: d.len(),
                });
            }
        }
        Ok(SampledCurve { times, points, derivs })
    }

    /// Builds a curve from generic points, converting to the second chart.
    pub fn from_points(times: Vec<f64>, points: &[GroupPoint], derivs: Option<Vec<Horizontal>>) -> Result<Self> {
        let pts = points
            .iter()
            .map(|p| {
                let c = p.to_array()?;
                Ok(match p.kind {
                    CoordKind::SecondExp => c,
                    CoordKind::FirstExp => engel::first_to_second(&c),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, pts, derivs)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Coords] {
        &self.points
    }

    pub fn derivs(&self) -> Option<&[Horizontal]> {
        self.derivs.as_deref()
    }

    pub fn require_derivs(&self) -> Result<&[Horizontal]> {
        self.derivs().ok_or(Error::MissingDerivatives)
    }

    pub fn point(&self, i: usize) -> GroupPoint {
        GroupPoint::from_array(CoordKind::SecondExp, self.points[i])
    }

    pub fn start(&self) -> Coords {
        self.points[0]
    }

    pub fn end(&self) -> Coords {
        self.points[self.points.len() - 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<Coords>, Option<Vec<Horizontal>>) {
        (self.times, self.points, self.derivs)
    }

    /// Index `i` of the cell `[t_i, t_{i+1}]` containing `t` (clamped).
    pub fn locate(&self, t: f64) -> usize {
        locate(&self.times, t)
    }

    /// Evaluates the curve between samples.
    ///
    /// With derivatives, the point is `γ(t_i) exp((t - t_i) ū)` where `ū` is
    /// the mean of the linearly interpolated control over `[t_i, t]`, so the
    /// interpolant is itself horizontal. Without derivatives the coordinates
    /// are interpolated linearly.
    pub fn eval(&self, t: f64) -> Coords {
        if self.len() == 1 {
            return self.points[0];
        }
        let i = self.locate(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.points[i];
        }
        if t == t1 {
            return self.points[i + 1];
        }
        let h = t1 - t0;
        let s = t - t0;
        match &self.derivs {
            Some(d) => {
                let w = 0.5 * s / h;
                let ubar = [
                    d[i][0] + w * (d[i + 1][0] - d[i][0]),
                    d[i][1] + w * (d[i + 1][1] - d[i][1]),
                ];
                engel::mul_second(&self.points[i], &engel::exp_horizontal_second(s, &ubar))
            }
            None => {
                let w = s / h;
                let (p, q) = (&self.points[i], &self.points[i + 1]);
                [
                    p[0] + w * (q[0] - p[0]),
                    p[1] + w * (q[1] - p[1]),
                    p[2] + w * (q[2] - p[2]),
                    p[3] + w * (q[3] - p[3]),
                ]
            }
        }
    }

    /// Linearly interpolated derivative.
    pub fn eval_deriv(&self, t: f64) -> Result<Horizontal> {
        let d = self.require_derivs()?;
        if self.len() == 1 {
            return Ok(d[0]);
        }
        let i = self.locate(t);
        let w = ((t - self.times[i]) / (self.times[i + 1] - self.times[i])).clamp(0.0, 1.0);
        Ok([
            d[i][0] + w * (d[i + 1][0] - d[i][0]),
            d[i][1] + w * (d[i + 1][1] - d[i][1]),
        ])
    }

    /// Left translation `p γ(t)` of every sample.
    pub fn left_translate(&self, p: &Coords) -> SampledCurve {
        SampledCurve {
            times: self.times.clone(),
            points: self.points.iter().map(|x| engel::mul_second(p, x)).collect(),
            derivs: self.derivs.clone(),
        }
    }

    /// Writes `t,x1,x2,x3,x4,u1,u2` rows with 17 significant digits.
    /// Missing derivatives are written as empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv: {e}"));
        wtr.write_record(["t", "x1", "x2", "x3", "x4", "u1", "u2"])
            .map_err(io)?;
        for (i, t) in self.times.iter().enumerate() {
            let p = &self.points[i];
            let mut rec: Vec<String> = std::iter::once(t).chain(p.iter()).map(|v| fmt17(*v)).collect();
            match &self.derivs {
                Some(d) => rec.extend(d[i].iter().map(|v| fmt17(*v))),
                None => rec.extend([String::new(), String::new()]),
            }
            wtr.write_record(&rec).map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
        Ok(())
    }

    /// Reads the format produced by [`SampledCurve::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let bad = |m: String| Error::InvalidParameter(format!("csv: {m}"));
        let (mut times, mut points, mut derivs) = (Vec::new(), Vec::new(), Vec::new());
        let mut have_derivs = true;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 7 {
                return Err(bad(format!("expected 7 columns, found {}", rec.len())));
            }
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("column {i}: {e}")))
            };
            times.push(num(0)?);
            points.push([num(1)?, num(2)?, num(3)?, num(4)?]);
            if rec[5].trim().is_empty() || rec[6].trim().is_empty() {
                have_derivs = false;
            } else {
                derivs.push([num(5)?, num(6)?]);
            }
        }
        Self::new(times, points, have_derivs.then_some(derivs))
    }
}

/// Fixed 17-significant-digit scientific formatting.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn locate(times: &[f64], t: f64) -> usize {
    let n = times.len();
    debug_assert!(n >= 2);
    match times.partition_point(|&s| s <= t) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    }
}

/// A sampled real function, linearly interpolated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn eval(&self, t: f64) -> f64 {
        if self.times.len() == 1 {
            return self.values[0];
        }
        let i = locate(&self.times, t);
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }
}
