use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed real interval `[lo, hi]`; the carrier of every cut-level result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::IntervalOrder { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Subset test with an absolute slack on both endpoints.
    pub fn is_within(&self, outer: &Interval, tol: f64) -> bool {
        self.lo >= outer.lo - tol && self.hi <= outer.hi + tol
    }

    /// Image under the increasing affine map `x -> a + b * x` (requires `b >= 0`).
    pub fn map_affine(&self, a: f64, b: f64) -> Self {
        debug_assert!(b >= 0.0);
        Self {
            lo: a + b * self.lo,
            hi: a + b * self.hi,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: f64,
    hi: f64,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;

    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(r.lo, r.hi)
    }
}

impl From<Interval> for IntervalRepr {
    fn from(iv: Interval) -> Self {
        IntervalRepr {
            lo: iv.lo,
            hi: iv.hi,
        }
    }
}
