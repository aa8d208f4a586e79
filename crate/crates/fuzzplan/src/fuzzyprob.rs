//! Fuzzy performance measures: acceptance-probability bands over cut levels,
//! average total inspection bands, and the misclassification transform of the
//! fuzzy defect fraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyNumber, TriangularFuzzy};
use crate::interval::Interval;
use crate::kernels::{pa_gmds, DistModel, PlanParams};
use crate::optim::extremize;

/// Grid resolution for band extremization; endpoints are always evaluated.
const BAND_GRID_POINTS: usize = 1025;
/// Absolute x-tolerance of the golden-section refinement.
const BAND_REFINE_TOL: f64 = 1e-8;

/// An acceptance-probability band at one cut level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyProbBand {
    pub nu: f64,
    pub band: Interval,
}

/// An average-total-inspection band at one cut level, in items per lot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtiBand {
    pub nu: f64,
    pub band: Interval,
    pub lot_size: u32,
}

/// Item misclassification rates: `delta1` is the probability a perfect item
/// is classified imperfect, `delta2` the probability an imperfect item is
/// classified perfect. `delta1 + delta2 < 1` keeps classification
/// informative (the apparent-rate transform stays strictly increasing).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InspectionErrorsRepr")]
pub struct InspectionErrors {
    delta1: f64,
    delta2: f64,
}

impl InspectionErrors {
    pub fn new(delta1: f64, delta2: f64) -> Result<Self> {
        let valid =
            (0.0..1.0).contains(&delta1) && (0.0..1.0).contains(&delta2) && delta1 + delta2 < 1.0;
        if !valid || delta1.is_nan() || delta2.is_nan() {
            return Err(Error::InspectionErrors { delta1, delta2 });
        }
        Ok(Self { delta1, delta2 })
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    /// Apparent defect fraction observed through an imperfect inspection:
    /// `p * (1 - delta2) + (1 - p) * delta1`.
    pub fn apparent_rate(&self, p: f64) -> f64 {
        p * (1.0 - self.delta2) + (1.0 - p) * self.delta1
    }
}

#[derive(Deserialize)]
struct InspectionErrorsRepr {
    delta1: f64,
    delta2: f64,
}

impl TryFrom<InspectionErrorsRepr> for InspectionErrors {
    type Error = Error;

    fn try_from(r: InspectionErrorsRepr) -> Result<Self> {
        InspectionErrors::new(r.delta1, r.delta2)
    }
}

/// Cut band of the acceptance probability: `[min, max]` of the crisp
/// deferred-state kernel over the fraction cut at level `nu`.
///
/// The constraint set collapses to `q = 1 - p`, so this is a one-dimensional
/// extremization over the cut. At level 1 the band degenerates to the crisp
/// value at the modal fraction.
pub fn pa_band<F: FuzzyNumber + ?Sized>(
    p_fuzzy: &F,
    nu: f64,
    plan: &PlanParams,
    model: DistModel,
) -> Result<Interval> {
    let cut = p_fuzzy.alpha_cut(nu)?;
    extremize(
        |p| pa_gmds(p, plan, model),
        cut,
        BAND_GRID_POINTS,
        BAND_REFINE_TOL,
    )
}

/// Affine transfer from an acceptance band to an inspection band:
/// `ATI = n + (1 - P_a)(N - n)` applied endpoint-to-endpoint.
///
/// ATI decreases in `P_a`, so the endpoints swap roles.
pub fn ati_interval(pa: Interval, n: u32, lot_size: u32) -> Result<Interval> {
    if lot_size < n {
        return Err(Error::LotSize {
            lot_size,
            sample_size: n,
        });
    }
    let n = f64::from(n);
    let span = f64::from(lot_size) - n;
    Interval::new(n + (1.0 - pa.hi()) * span, n + (1.0 - pa.lo()) * span)
}

/// Cut band of the average total inspection under rectifying inspection of
/// rejected lots.
pub fn ati_band<F: FuzzyNumber + ?Sized>(
    p_fuzzy: &F,
    nu: f64,
    plan: &PlanParams,
    model: DistModel,
    lot_size: u32,
) -> Result<Interval> {
    if lot_size < plan.n() {
        return Err(Error::LotSize {
            lot_size,
            sample_size: plan.n(),
        });
    }
    let pa = pa_band(p_fuzzy, nu, plan, model)?;
    ati_interval(pa, plan.n(), lot_size)
}

/// Transform a fuzzy defect fraction through imperfect inspection.
///
/// Each vertex maps by `p -> p(1 - delta2) + (1 - p) delta1`; the map is
/// affine increasing (slope `1 - delta1 - delta2 > 0`), so vertex order is
/// preserved and cuts map endpoint-to-endpoint.
pub fn apply_inspection_errors(
    p_fuzzy: &TriangularFuzzy,
    errors: &InspectionErrors,
) -> TriangularFuzzy {
    p_fuzzy
        .map_increasing(|p| errors.apparent_rate(p))
        .expect("affine increasing map of [0,1] into itself preserves validity")
}

/// Acceptance band of the error-perturbed fraction.
pub fn pa_band_with_errors(
    p_fuzzy: &TriangularFuzzy,
    errors: &InspectionErrors,
    nu: f64,
    plan: &PlanParams,
    model: DistModel,
) -> Result<Interval> {
    pa_band(&apply_inspection_errors(p_fuzzy, errors), nu, plan, model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn example_plan_binomial() -> PlanParams {
        PlanParams::new(87, 5, 1, 0, 3).unwrap()
    }

    #[test]
    fn band_reference_points_binomial() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let plan = example_plan_binomial();

        let b0 = pa_band(&p, 0.0, &plan, DistModel::Binomial).unwrap();
        assert!(close(b0.lo(), 0.28, 0.01), "lo {}", b0.lo());
        assert!(close(b0.hi(), 0.95, 0.01), "hi {}", b0.hi());

        let b3 = pa_band(&p, 0.3, &plan, DistModel::Binomial).unwrap();
        assert!(close(b3.lo(), 0.36, 0.01), "lo {}", b3.lo());
        assert!(close(b3.hi(), 0.87, 0.01), "hi {}", b3.hi());
    }

    #[test]
    fn band_at_level_one_is_the_crisp_value() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let plan = example_plan_binomial();
        let b = pa_band(&p, 1.0, &plan, DistModel::Binomial).unwrap();
        assert_eq!(b.width(), 0.0);
        let crisp = pa_gmds(0.02, &plan, DistModel::Binomial).unwrap();
        assert_eq!(b.lo(), crisp);
    }

    #[test]
    fn degenerate_fuzzy_reduces_to_crisp() {
        let x = 0.025;
        let p = TriangularFuzzy::crisp(x).unwrap();
        let plan = example_plan_binomial();
        for nu in [0.0, 0.5, 1.0] {
            let b = pa_band(&p, nu, &plan, DistModel::Binomial).unwrap();
            let crisp = pa_gmds(x, &plan, DistModel::Binomial).unwrap();
            assert_eq!((b.lo(), b.hi()), (crisp, crisp));
        }
    }

    #[test]
    fn band_nestedness_across_levels() {
        let p = TriangularFuzzy::new(0.005, 0.02, 0.06).unwrap();
        let plan = example_plan_binomial();
        let mut prev = pa_band(&p, 0.0, &plan, DistModel::Binomial).unwrap();
        for nu in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let b = pa_band(&p, nu, &plan, DistModel::Binomial).unwrap();
            assert!(
                b.is_within(&prev, 1e-9),
                "nu {nu}: {b:?} not within {prev:?}"
            );
            prev = b;
        }
    }

    #[test]
    fn inspection_error_transform_reference() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let e = InspectionErrors::new(0.01, 0.08).unwrap();
        let t = apply_inspection_errors(&p, &e);
        let v = t.vertices();
        assert!(close(v[0], 0.0191, 1e-12));
        assert!(close(v[1], 0.0282, 1e-12));
        assert!(close(v[2], 0.0373, 1e-12));
    }

    #[test]
    fn inspection_error_identity_and_degenerate_cases() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let none = InspectionErrors::new(0.0, 0.0).unwrap();
        assert_eq!(apply_inspection_errors(&p, &none), p);

        // Only false positives remain at a crisp zero fraction.
        let zero = TriangularFuzzy::crisp(0.0).unwrap();
        let e = InspectionErrors::new(0.01, 0.0).unwrap();
        let t = apply_inspection_errors(&zero, &e);
        assert_eq!(t.vertices(), [0.01, 0.01, 0.01]);
    }

    #[test]
    fn inspection_errors_rejects_uninformative_rates() {
        assert!(InspectionErrors::new(0.6, 0.5).is_err());
        assert!(InspectionErrors::new(1.0, 0.0).is_err());
        assert!(InspectionErrors::new(-0.1, 0.0).is_err());
        assert!(InspectionErrors::new(0.3, 0.69).is_ok());
    }

    #[test]
    fn with_errors_band_reference() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let e = InspectionErrors::new(0.01, 0.08).unwrap();
        let plan = example_plan_binomial();
        let b = pa_band_with_errors(&p, &e, 0.0, &plan, DistModel::Binomial).unwrap();
        assert!(close(b.lo(), 0.13, 0.01), "lo {}", b.lo());
        assert!(close(b.hi(), 0.66, 0.01), "hi {}", b.hi());

        // Zero error rates leave the band untouched.
        let none = InspectionErrors::new(0.0, 0.0).unwrap();
        let plain = pa_band(&p, 0.0, &plan, DistModel::Binomial).unwrap();
        let same = pa_band_with_errors(&p, &none, 0.0, &plan, DistModel::Binomial).unwrap();
        assert_eq!(plain, same);
    }

    #[test]
    fn ati_boundary_cases() {
        let plan = example_plan_binomial();
        let zero = TriangularFuzzy::crisp(0.0).unwrap();
        let b = ati_band(&zero, 0.0, &plan, DistModel::Binomial, 1000).unwrap();
        assert_eq!((b.lo(), b.hi()), (87.0, 87.0));

        let one = TriangularFuzzy::crisp(1.0).unwrap();
        let b = ati_band(&one, 0.0, &plan, DistModel::Binomial, 1000).unwrap();
        assert_eq!((b.lo(), b.hi()), (1000.0, 1000.0));

        assert!(matches!(
            ati_band(&zero, 0.0, &plan, DistModel::Binomial, 50),
            Err(Error::LotSize { .. })
        ));
    }

    #[test]
    fn ati_reconstructs_from_pa_band_exactly() {
        let p = TriangularFuzzy::new(0.01, 0.02, 0.03).unwrap();
        let plan = example_plan_binomial();
        let lot = 1000;
        let pa = pa_band(&p, 0.0, &plan, DistModel::Binomial).unwrap();
        let ati = ati_band(&p, 0.0, &plan, DistModel::Binomial, lot).unwrap();
        let rebuilt = ati_interval(pa, plan.n(), lot).unwrap();
        assert!(close(ati.lo(), rebuilt.lo(), 1e-12));
        assert!(close(ati.hi(), rebuilt.hi(), 1e-12));
        assert!(87.0 <= ati.lo() && ati.hi() <= 1000.0);
    }
}
