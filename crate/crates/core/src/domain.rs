//! Axis-aligned boxes in R^n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed box `[lo_1, hi_1] x ... x [lo_n, hi_n]` with finite corners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxSpec", into = "BoxSpec")]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TryFrom<BoxSpec> for AxisBox {
    type Error = Error;
    fn try_from(spec: BoxSpec) -> Result<Self> {
        AxisBox::new(spec.lo, spec.hi)
    }
}

impl From<AxisBox> for BoxSpec {
    fn from(b: AxisBox) -> Self {
        BoxSpec { lo: b.lo, hi: b.hi }
    }
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument(format!(
                "box corners must be non-empty and of equal length (got {} and {})",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "box is unbounded in coordinate {i}"
                )));
            }
            if l > h {
                return Err(Error::InvalidArgument(format!(
                    "box has lo > hi in coordinate {i} ({l} > {h})"
                )));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        AxisBox::new(vec![lo; dim], vec![hi; dim])
    }

    /// Smallest box containing every point.
    pub fn hull<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut iter = points.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidArgument("hull of an empty point set".into()))?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in iter {
            if p.len() != lo.len() {
                return Err(Error::InvalidArgument("hull of points with mixed dimension".into()));
            }
            for (i, &v) in p.iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        AxisBox::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        other.dim() == self.dim()
            && other.lo.iter().zip(&self.lo).all(|(o, s)| o >= s)
            && other.hi.iter().zip(&self.hi).all(|(o, s)| o <= s)
    }

    /// Box grown by `delta` on every side.
    pub fn enlarge(&self, delta: f64) -> Result<Self> {
        AxisBox::new(
            self.lo.iter().map(|l| l - delta).collect(),
            self.hi.iter().map(|h| h + delta).collect(),
        )
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    /// Longest side length.
    pub fn max_extent(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }
}
