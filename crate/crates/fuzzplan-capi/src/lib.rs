//! C ABI for the acceptance-sampling library: opaque handles, status codes,
//! out-parameters for numeric results, and JSON strings for the structured
//! design surface. The matching header lives in `include/fuzzplan.h`.
//!
//! Every function is safe to call from any thread; error details for the
//! most recent failing call on the current thread are available through
//! [`fp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use fuzzplan::design::{
    design_dsp, design_gmds, design_mds, design_ssp, DesignResult, OCRequirement, Risk,
    SearchLimits,
};
use fuzzplan::fuzzy::{FuzzyFraction, FuzzyNumber};
use fuzzplan::fuzzyprob::{
    apply_inspection_errors, ati_band, pa_band, pa_band_with_errors, InspectionErrors,
};
use fuzzplan::kernels::{pa_gmds, DistModel, PlanParams};
use fuzzplan::simulate::{simulate_gmds, SimConfig};
use fuzzplan::{PentagonalFuzzy, TriangularFuzzy};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    /// A design request had no feasible plan within its limits.
    Infeasible = 1,
    /// Invalid argument or domain violation.
    Invalid = 2,
    /// Internal consistency failure.
    Internal = 3,
    /// A required pointer was null.
    NullPointer = 4,
    /// A string argument was not valid UTF-8 or JSON.
    BadString = 5,
}

/// Defect-count model selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpModel {
    Binomial = 0,
    Poisson = 1,
}

impl From<FpModel> for DistModel {
    fn from(m: FpModel) -> Self {
        match m {
            FpModel::Binomial => DistModel::Binomial,
            FpModel::Poisson => DistModel::Poisson,
        }
    }
}

/// Opaque deferred-state plan handle.
pub struct FpPlan(PlanParams);

/// Opaque fuzzy-fraction handle.
pub struct FpFuzzy(FuzzyFraction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &fuzzplan::Error) -> FpStatus {
    match err {
        fuzzplan::Error::Inconsistency(_) => FpStatus::Internal,
        _ => FpStatus::Invalid,
    }
}

fn fail(err: fuzzplan::Error) -> FpStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Message of the most recent failing call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

macro_rules! nonnull {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error("null pointer argument".into());
                return FpStatus::NullPointer;
            }
        }
    };
}

macro_rules! out_slot {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => {
                set_error("null output pointer".into());
                return FpStatus::NullPointer;
            }
        }
    };
}

/// Create a plan handle; free with [`fp_plan_free`].
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_plan_new(
    n: u32,
    m: u32,
    k: u32,
    c1: u32,
    c2: u32,
    out: *mut *mut FpPlan,
) -> FpStatus {
    let slot = out_slot!(out);
    match PlanParams::new(n, m, k, c1, c2) {
        Ok(plan) => {
            clear_error();
            *slot = Box::into_raw(Box::new(FpPlan(plan)));
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `plan` must be a pointer from [`fp_plan_new`] not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn fp_plan_free(plan: *mut FpPlan) {
    if !plan.is_null() {
        drop(unsafe { Box::from_raw(plan) });
    }
}

/// Create a triangular fuzzy fraction; free with [`fp_fuzzy_free`].
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_fuzzy_triangular(
    p1: f64,
    p2: f64,
    p3: f64,
    out: *mut *mut FpFuzzy,
) -> FpStatus {
    let slot = out_slot!(out);
    match TriangularFuzzy::new(p1, p2, p3) {
        Ok(t) => {
            clear_error();
            *slot = Box::into_raw(Box::new(FpFuzzy(t.into())));
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Create a pentagonal fuzzy fraction; free with [`fp_fuzzy_free`].
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_fuzzy_pentagonal(
    x1: f64,
    x2: f64,
    x3: f64,
    x4: f64,
    x5: f64,
    out: *mut *mut FpFuzzy,
) -> FpStatus {
    let slot = out_slot!(out);
    match PentagonalFuzzy::new(x1, x2, x3, x4, x5) {
        Ok(p) => {
            clear_error();
            *slot = Box::into_raw(Box::new(FpFuzzy(p.into())));
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `fuzzy` must be a pointer from a fuzzy constructor not yet freed, or null.
#[no_mangle]
pub unsafe extern "C" fn fp_fuzzy_free(fuzzy: *mut FpFuzzy) {
    if !fuzzy.is_null() {
        drop(unsafe { Box::from_raw(fuzzy) });
    }
}

/// Crisp acceptance probability of the deferred-state plan.
///
/// # Safety
/// `plan` must be a live plan handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_pa_gmds(
    plan: *const FpPlan,
    model: FpModel,
    p: f64,
    out: *mut f64,
) -> FpStatus {
    let plan = nonnull!(plan);
    let slot = out_slot!(out);
    match pa_gmds(p, &plan.0, model.into()) {
        Ok(v) => {
            clear_error();
            *slot = v;
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Cut of the fuzzy fraction at level `nu`.
///
/// # Safety
/// `fuzzy` must be a live fuzzy handle; `out_lo`/`out_hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_alpha_cut(
    fuzzy: *const FpFuzzy,
    nu: f64,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FpStatus {
    let fuzzy = nonnull!(fuzzy);
    let lo = out_slot!(out_lo);
    let hi = out_slot!(out_hi);
    match fuzzy.0.alpha_cut(nu) {
        Ok(cut) => {
            clear_error();
            *lo = cut.lo();
            *hi = cut.hi();
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Acceptance-probability band of the plan over the fraction cut at `nu`.
///
/// # Safety
/// `fuzzy` and `plan` must be live handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_pa_band(
    fuzzy: *const FpFuzzy,
    nu: f64,
    plan: *const FpPlan,
    model: FpModel,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FpStatus {
    let fuzzy = nonnull!(fuzzy);
    let plan = nonnull!(plan);
    let lo = out_slot!(out_lo);
    let hi = out_slot!(out_hi);
    match pa_band(&fuzzy.0, nu, &plan.0, model.into()) {
        Ok(band) => {
            clear_error();
            *lo = band.lo();
            *hi = band.hi();
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Average-total-inspection band for lot size `lot_size`.
///
/// # Safety
/// `fuzzy` and `plan` must be live handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_ati_band(
    fuzzy: *const FpFuzzy,
    nu: f64,
    plan: *const FpPlan,
    model: FpModel,
    lot_size: u32,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FpStatus {
    let fuzzy = nonnull!(fuzzy);
    let plan = nonnull!(plan);
    let lo = out_slot!(out_lo);
    let hi = out_slot!(out_hi);
    match ati_band(&fuzzy.0, nu, &plan.0, model.into(), lot_size) {
        Ok(band) => {
            clear_error();
            *lo = band.lo();
            *hi = band.hi();
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Transform a triangular fraction through inspection error rates.
///
/// # Safety
/// `fuzzy` must be a live triangular handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_apply_inspection_errors(
    fuzzy: *const FpFuzzy,
    delta1: f64,
    delta2: f64,
    out: *mut *mut FpFuzzy,
) -> FpStatus {
    let fuzzy = nonnull!(fuzzy);
    let slot = out_slot!(out);
    let Some(tri) = fuzzy.0.as_triangular() else {
        set_error("inspection-error transform requires a triangular fuzzy number".into());
        return FpStatus::Invalid;
    };
    match InspectionErrors::new(delta1, delta2) {
        Ok(errors) => {
            clear_error();
            let transformed = apply_inspection_errors(tri, &errors);
            *slot = Box::into_raw(Box::new(FpFuzzy(transformed.into())));
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Acceptance band of the error-perturbed fraction.
///
/// # Safety
/// `fuzzy` and `plan` must be live handles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_pa_band_with_errors(
    fuzzy: *const FpFuzzy,
    delta1: f64,
    delta2: f64,
    nu: f64,
    plan: *const FpPlan,
    model: FpModel,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FpStatus {
    let fuzzy = nonnull!(fuzzy);
    let plan = nonnull!(plan);
    let lo = out_slot!(out_lo);
    let hi = out_slot!(out_hi);
    let Some(tri) = fuzzy.0.as_triangular() else {
        set_error("inspection-error analysis requires a triangular fuzzy number".into());
        return FpStatus::Invalid;
    };
    let errors = match InspectionErrors::new(delta1, delta2) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    match pa_band_with_errors(tri, &errors, nu, &plan.0, model.into()) {
        Ok(band) => {
            clear_error();
            *lo = band.lo();
            *hi = band.hi();
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Simulate the lot stream; `delta1 = delta2 = 0` runs error-free.
///
/// # Safety
/// `plan` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fp_simulate_gmds(
    p: f64,
    plan: *const FpPlan,
    model: FpModel,
    lots: u64,
    warmup: u64,
    seed: u64,
    delta1: f64,
    delta2: f64,
    out_rate: *mut f64,
    out_stderr: *mut f64,
) -> FpStatus {
    let plan = nonnull!(plan);
    let rate_slot = out_slot!(out_rate);
    let stderr_slot = out_slot!(out_stderr);
    let errors = if delta1 == 0.0 && delta2 == 0.0 {
        None
    } else {
        match InspectionErrors::new(delta1, delta2) {
            Ok(e) => Some(e),
            Err(e) => return fail(e),
        }
    };
    let cfg = SimConfig {
        p,
        plan: plan.0,
        model: model.into(),
        lots,
        warmup,
        seed,
        errors,
    };
    match simulate_gmds(&cfg) {
        Ok(res) => {
            clear_error();
            *rate_slot = res.accept_rate;
            *stderr_slot = res.stderr;
            FpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[derive(serde::Deserialize)]
struct DesignRequest {
    aql: FuzzyFraction,
    lql: FuzzyFraction,
    alpha: Risk,
    beta: Risk,
    #[serde(default = "one")]
    nu: f64,
    model: DistModel,
    #[serde(default)]
    limits: Option<SearchLimits>,
    #[serde(default)]
    family: Option<String>,
}

fn one() -> f64 {
    1.0
}

/// Design a plan from a JSON request and return a JSON result.
///
/// The request mirrors the CLI config schema:
/// `{"aql":..., "lql":..., "alpha":..., "beta":..., "nu":..., "model":...,
///   "limits":..., "family":"gmds"|"mds"|"ssp"|"dsp"}`.
/// On success and on infeasibility `*out_json` carries the serialized
/// result; free it with [`fp_string_free`].
///
/// # Safety
/// `request_json` must be a NUL-terminated string; `out_json` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn fp_design_json(
    request_json: *const c_char,
    out_json: *mut *mut c_char,
) -> FpStatus {
    let slot = out_slot!(out_json);
    if request_json.is_null() {
        set_error("null request".into());
        return FpStatus::NullPointer;
    }
    let raw = match unsafe { CStr::from_ptr(request_json) }.to_str() {
        Ok(s) => s,
        Err(e) => {
            set_error(format!("request is not UTF-8: {e}"));
            return FpStatus::BadString;
        }
    };
    let request: DesignRequest = match serde_json::from_str(raw) {
        Ok(r) => r,
        Err(e) => {
            set_error(format!("request is not valid JSON: {e}"));
            return FpStatus::BadString;
        }
    };
    let req = match OCRequirement::new(
        request.aql,
        request.lql,
        request.alpha,
        request.beta,
        request.nu,
    ) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let limits = request.limits.unwrap_or_default();
    let designer = match request.family.as_deref().unwrap_or("gmds") {
        "gmds" => design_gmds,
        "mds" => design_mds,
        "ssp" => design_ssp,
        "dsp" => design_dsp,
        other => {
            set_error(format!("unknown family {other:?}"));
            return FpStatus::Invalid;
        }
    };
    let result: DesignResult = match designer(&req, request.model, &limits) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let feasible = result.feasible;
    let json = serde_json::to_string(&result).expect("result serializes");
    let c = match CString::new(json) {
        Ok(c) => c,
        Err(_) => {
            set_error("result contained a NUL byte".into());
            return FpStatus::Internal;
        }
    };
    clear_error();
    *slot = c.into_raw();
    if feasible {
        FpStatus::Ok
    } else {
        FpStatus::Infeasible
    }
}

/// Free a string returned by [`fp_design_json`].
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
