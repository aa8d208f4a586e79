//! Fuzzy fraction-defective representations and their cut-level machinery.
//!
//! Every downstream formula consumes fuzzy numbers exclusively through
//! nu-cuts, so membership functions are never evaluated pointwise here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

fn check_level(nu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&nu) || nu.is_nan() {
        return Err(Error::CutLevel(nu));
    }
    Ok(())
}

fn check_vertices(vs: &[f64]) -> Result<()> {
    let ordered = vs.windows(2).all(|w| w[0] <= w[1]);
    let in_unit = vs.iter().all(|v| (0.0..=1.0).contains(v));
    if !ordered || !in_unit || vs.iter().any(|v| v.is_nan()) {
        return Err(Error::VertexOrder(vs.to_vec()));
    }
    Ok(())
}

/// Anything that yields a crisp interval for every cut level in `[0, 1]`.
///
/// Cuts are nested (`nu' > nu` implies `cut(nu') ⊆ cut(nu)`) and the cut at
/// level 1 is the single modal point.
pub trait FuzzyNumber {
    fn alpha_cut(&self, nu: f64) -> Result<Interval>;

    /// The modal value, i.e. the single point of `alpha_cut(1)`.
    fn modal(&self) -> f64;

    /// The support, i.e. `alpha_cut(0)`.
    fn support(&self) -> Interval {
        self.alpha_cut(0.0).expect("level 0 is always valid")
    }

    /// A fuzzy number with zero spread represents a crisp fraction.
    fn is_crisp(&self) -> bool {
        self.support().width() == 0.0
    }
}

/// Triangular fuzzy fraction `(p1, p2, p3)` with `0 <= p1 <= p2 <= p3 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularFuzzy {
    p1: f64,
    p2: f64,
    p3: f64,
}

impl TriangularFuzzy {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        check_vertices(&[p1, p2, p3])?;
        Ok(Self { p1, p2, p3 })
    }

    /// Degenerate number `(x, x, x)`; all fuzzy operations reduce exactly to
    /// crisp ones on it.
    pub fn crisp(x: f64) -> Result<Self> {
        Self::new(x, x, x)
    }

    pub fn vertices(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Spreads `(p2 - p1, p3 - p1)` relative to the left vertex.
    pub fn spreads(&self) -> (f64, f64) {
        (self.p2 - self.p1, self.p3 - self.p1)
    }

    /// Largest admissible facilitator shift: the shifted support must stay
    /// inside `[0, 1]`.
    pub fn theta_max(&self) -> f64 {
        1.0 - (self.p3 - self.p1)
    }

    /// Translate the number to left vertex `theta`, preserving its shape.
    ///
    /// With `b_j = p_j - p1` the result is `(theta, b2 + theta, b3 + theta)`.
    pub fn theta_shift(&self, theta: f64) -> Result<Self> {
        let (b2, b3) = self.spreads();
        let max = self.theta_max();
        if !(0.0..=max).contains(&theta) || theta.is_nan() {
            return Err(Error::ThetaRange { theta, max });
        }
        // min() absorbs the one-ulp overshoot possible at theta = theta_max.
        Self::new(theta, (b2 + theta).min(1.0), (b3 + theta).min(1.0))
    }

    /// Vertex-wise image under an increasing map; the caller guarantees
    /// monotonicity so vertex order is preserved.
    pub(crate) fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(f(self.p1), f(self.p2), f(self.p3))
    }
}

impl FuzzyNumber for TriangularFuzzy {
    fn alpha_cut(&self, nu: f64) -> Result<Interval> {
        check_level(nu)?;
        if nu == 0.0 {
            return Interval::new(self.p1, self.p3);
        }
        if nu == 1.0 {
            return Ok(Interval::point(self.p2));
        }
        // Clamps keep the endpoints inside their linear segments so cuts stay
        // ordered and nested under floating-point rounding.
        let lo = (self.p1 + (self.p2 - self.p1) * nu).clamp(self.p1, self.p2);
        let hi = (self.p3 - (self.p3 - self.p2) * nu).clamp(self.p2, self.p3);
        Interval::new(lo, hi)
    }

    fn modal(&self) -> f64 {
        self.p2
    }
}

/// Pentagonal fuzzy fraction `(x1..x5)`, piecewise linear with knots at
/// cut levels 0.5 and a single-point core `{x3}` at level 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PentagonalFuzzy {
    x: [f64; 5],
}

impl PentagonalFuzzy {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64) -> Result<Self> {
        let x = [x1, x2, x3, x4, x5];
        check_vertices(&x)?;
        Ok(Self { x })
    }

    pub fn vertices(&self) -> [f64; 5] {
        self.x
    }
}

impl FuzzyNumber for PentagonalFuzzy {
    fn alpha_cut(&self, nu: f64) -> Result<Interval> {
        check_level(nu)?;
        let [x1, x2, x3, x4, x5] = self.x;
        if nu == 0.0 {
            return Interval::new(x1, x5);
        }
        if nu == 1.0 {
            return Ok(Interval::point(x3));
        }
        if nu == 0.5 {
            return Interval::new(x2, x4);
        }
        let (lo, hi) = if nu < 0.5 {
            let t = 2.0 * nu;
            (
                (x1 + t * (x2 - x1)).clamp(x1, x2),
                (x5 - t * (x5 - x4)).clamp(x4, x5),
            )
        } else {
            let t = 2.0 * nu - 1.0;
            (
                (x2 + t * (x3 - x2)).clamp(x2, x3),
                (x4 - t * (x4 - x3)).clamp(x3, x4),
            )
        };
        Interval::new(lo, hi)
    }

    fn modal(&self) -> f64 {
        self.x[2]
    }
}

/// A fuzzy fraction of either supported shape; the JSON-facing carrier.
///
/// Serializes as `{"kind":"triangular","points":[p1,p2,p3]}` or
/// `{"kind":"pentagonal","points":[x1,...,x5]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuzzyFractionRepr", into = "FuzzyFractionRepr")]
pub enum FuzzyFraction {
    Triangular(TriangularFuzzy),
    Pentagonal(PentagonalFuzzy),
}

impl FuzzyFraction {
    pub fn crisp(x: f64) -> Result<Self> {
        Ok(Self::Triangular(TriangularFuzzy::crisp(x)?))
    }

    pub fn as_triangular(&self) -> Option<&TriangularFuzzy> {
        match self {
            Self::Triangular(t) => Some(t),
            Self::Pentagonal(_) => None,
        }
    }
}

impl FuzzyNumber for FuzzyFraction {
    fn alpha_cut(&self, nu: f64) -> Result<Interval> {
        match self {
            Self::Triangular(t) => t.alpha_cut(nu),
            Self::Pentagonal(p) => p.alpha_cut(nu),
        }
    }

    fn modal(&self) -> f64 {
        match self {
            Self::Triangular(t) => t.modal(),
            Self::Pentagonal(p) => p.modal(),
        }
    }
}

impl From<TriangularFuzzy> for FuzzyFraction {
    fn from(t: TriangularFuzzy) -> Self {
        Self::Triangular(t)
    }
}

impl From<PentagonalFuzzy> for FuzzyFraction {
    fn from(p: PentagonalFuzzy) -> Self {
        Self::Pentagonal(p)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FuzzyFractionRepr {
    Triangular { points: [f64; 3] },
    Pentagonal { points: [f64; 5] },
}

impl TryFrom<FuzzyFractionRepr> for FuzzyFraction {
    type Error = Error;

    fn try_from(r: FuzzyFractionRepr) -> Result<Self> {
        match r {
            FuzzyFractionRepr::Triangular { points: [a, b, c] } => {
                Ok(Self::Triangular(TriangularFuzzy::new(a, b, c)?))
            }
            FuzzyFractionRepr::Pentagonal {
                points: [a, b, c, d, e],
            } => Ok(Self::Pentagonal(PentagonalFuzzy::new(a, b, c, d, e)?)),
        }
    }
}

impl From<FuzzyFraction> for FuzzyFractionRepr {
    fn from(f: FuzzyFraction) -> Self {
        match f {
            FuzzyFraction::Triangular(t) => FuzzyFractionRepr::Triangular {
                points: t.vertices(),
            },
            FuzzyFraction::Pentagonal(p) => FuzzyFractionRepr::Pentagonal {
                points: p.vertices(),
            },
        }
    }
}
