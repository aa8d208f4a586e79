//! Operating-characteristic band generation: sweep the facilitator shift and
//! the cut levels to trace the band the acceptance probability occupies as
//! the fuzzy defect fraction travels along `[0, 1]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyNumber, TriangularFuzzy};
use crate::fuzzyprob::{apply_inspection_errors, pa_band, InspectionErrors};
use crate::interval::Interval;
use crate::kernels::{DistModel, PlanParams};

/// Default facilitator grid: 0.00, 0.01, ..., 0.10.
pub fn default_theta_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 100.0).collect()
}

/// Default cut levels for band tables.
pub fn default_nu_levels() -> Vec<f64> {
    vec![0.0, 0.3, 0.7, 1.0]
}

/// One cell of a band table: the fraction cut and the acceptance band at a
/// given facilitator shift and cut level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocBandPoint {
    pub theta: f64,
    pub nu: f64,
    pub p_cut: Interval,
    pub pa_cut: Interval,
    pub with_errors: bool,
}

/// Sweep the facilitator shift over `theta_grid` and the cut level over
/// `nu_levels`, producing one point per `(theta, nu)` pair in theta-major,
/// nu-minor order.
///
/// With `errors` supplied, the shifted family is built on the
/// error-transformed number, so every band reflects the apparent defect
/// fraction seen by the imperfect inspection.
pub fn foc_band(
    base: &TriangularFuzzy,
    plan: &PlanParams,
    model: DistModel,
    nu_levels: &[f64],
    theta_grid: &[f64],
    errors: Option<&InspectionErrors>,
) -> Result<Vec<FocBandPoint>> {
    let family_base = match errors {
        Some(e) => apply_inspection_errors(base, e),
        None => *base,
    };
    let theta_max = family_base.theta_max();
    for &theta in theta_grid {
        if !(0.0..=theta_max).contains(&theta) || theta.is_nan() {
            return Err(Error::ThetaRange {
                theta,
                max: theta_max,
            });
        }
    }
    for &nu in nu_levels {
        if !(0.0..=1.0).contains(&nu) || nu.is_nan() {
            return Err(Error::CutLevel(nu));
        }
    }

    // Cells are independent; parallelize over theta and keep the output
    // order deterministic through indexed collection.
    let rows: Result<Vec<Vec<FocBandPoint>>> = theta_grid
        .par_iter()
        .map(|&theta| {
            let shifted = family_base.theta_shift(theta)?;
            nu_levels
                .iter()
                .map(|&nu| {
                    Ok(FocBandPoint {
                        theta,
                        nu,
                        p_cut: shifted.alpha_cut(nu)?,
                        pa_cut: pa_band(&shifted, nu, plan, model)?,
                        with_errors: errors.is_some(),
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}
