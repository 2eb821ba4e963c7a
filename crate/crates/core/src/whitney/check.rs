use serde::{Deserialize, Serialize};

use super::CurveFragment;
use crate::error::Result;
use crate::horizontal::difference_quotient_sup;

/// Sampled `r_{K,η}` over a decreasing list of scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyTable {
    pub etas: Vec<f64>,
    pub r: Vec<f64>,
    /// `r` does not increase as `η` shrinks.
    pub monotone: bool,
    /// The finest value is negligible or at most half the coarsest one.
    pub decaying: bool,
}

impl WhitneyTable {
    pub fn finest(&self) -> f64 {
        self.r.last().copied().unwrap_or(0.0)
    }

    pub fn coarsest(&self) -> f64 {
        self.r.first().copied().unwrap_or(0.0)
    }
}

/// Largest spacing between consecutive samples of the same interval of `K`,
/// or `None` when every interval is a single sample.
pub(crate) fn max_spacing(frag: &CurveFragment) -> Option<f64> {
    let t = frag.times();
    let k = frag.k();
    t.windows(2)
        .filter(|w| k.intervals().iter().any(|&(a, b)| a <= w[0] && w[1] <= b))
        .map(|w| w[1] - w[0])
        .fold(None, |m, h| Some(m.map_or(h, |m: f64| m.max(h))))
}

/// Eight scales halving down to 2.5 times the largest in-interval spacing.
pub fn default_etas(frag: &CurveFragment) -> Vec<f64> {
    let finest = max_spacing(frag).map_or(1.0, |h| 2.5 * h);
    (0..8).rev().map(|k| finest * f64::powi(2.0, k)).collect()
}

/// Evaluates `r_{K,η}` for each `η` (sorted into decreasing order).
pub fn check_whitney(frag: &CurveFragment, etas: &[f64]) -> Result<WhitneyTable> {
    let mut etas = etas.to_vec();
    etas.sort_by(|a, b| b.total_cmp(a));
    let r = etas
        .iter()
        .map(|&e| difference_quotient_sup(frag, e))
        .collect::<Result<Vec<_>>>()?;
    let monotone = r.windows(2).all(|w| w[1] <= w[0]);
    let (first, last) = (r.first().copied().unwrap_or(0.0), r.last().copied().unwrap_or(0.0));
    let decaying = last <= 1e-12 || last < 0.5 * first;
    Ok(WhitneyTable {
        etas,
        r,
        monotone,
        decaying,
    })
}
