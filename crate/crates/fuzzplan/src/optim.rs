//! Bounded scalar extremization used to turn cut intervals into value bands.

use crate::error::Result;
use crate::interval::Interval;

const INV_GOLDEN_SQ: f64 = 0.381_966_011_250_105_1; // 2 - phi

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Stops once the bracket shrinks below `tol`; returns the best evaluation.
fn golden_min(
    f: &mut impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut x1 = a + INV_GOLDEN_SQ * (b - a);
    let mut x2 = b - INV_GOLDEN_SQ * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_GOLDEN_SQ * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_GOLDEN_SQ * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Min and max of `f` over a closed interval.
///
/// A uniform grid of `grid_points` evaluations (endpoints always included)
/// locates the candidate optima; golden-section refinement then polishes each
/// within its bracketing grid cell down to absolute x-tolerance `tol`. No
/// monotonicity or convexity is assumed.
pub(crate) fn extremize(
    mut f: impl FnMut(f64) -> Result<f64>,
    over: Interval,
    grid_points: usize,
    tol: f64,
) -> Result<Interval> {
    debug_assert!(grid_points >= 2);
    if over.width() == 0.0 {
        let v = f(over.lo())?;
        return Ok(Interval::point(v));
    }

    let (a, b) = (over.lo(), over.hi());
    let step = (b - a) / (grid_points - 1) as f64;
    let mut min = (a, f64::INFINITY);
    let mut max = (a, f64::NEG_INFINITY);
    let mut idx_min = 0usize;
    let mut idx_max = 0usize;
    for i in 0..grid_points {
        // Hit the right endpoint exactly.
        let x = if i + 1 == grid_points {
            b
        } else {
            a + step * i as f64
        };
        let v = f(x)?;
        if v < min.1 {
            min = (x, v);
            idx_min = i;
        }
        if v > max.1 {
            max = (x, v);
            idx_max = i;
        }
    }

    let bracket = |i: usize| {
        let lo = if i == 0 { a } else { a + step * (i - 1) as f64 };
        let hi = if i + 2 >= grid_points {
            b
        } else {
            a + step * (i + 1) as f64
        };
        (lo.max(a), hi.min(b))
    };

    let (lo_br, hi_br) = bracket(idx_min);
    let refined_min = golden_min(&mut f, lo_br, hi_br, tol)?;
    let best_min = if refined_min.1 < min.1 {
        refined_min.1
    } else {
        min.1
    };

    let (lo_br, hi_br) = bracket(idx_max);
    let mut neg = |x: f64| f(x).map(|v| -v);
    let refined_max = golden_min(&mut neg, lo_br, hi_br, tol)?;
    let best_max = if -refined_max.1 > max.1 {
        -refined_max.1
    } else {
        max.1
    };

    Interval::new(best_min, best_max)
}
