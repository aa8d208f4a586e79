//! Two-point plan design: find the smallest sample size meeting a producer
//! risk at the acceptable quality level and a consumer risk at the limiting
//! quality level, for the deferred-state family and the comparison families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyFraction, FuzzyNumber};
use crate::fuzzyprob::pa_band;
use crate::interval::Interval;
use crate::kernels::{asn_dsp, pa_dsp, pa_ssp, DistModel, DspParams, PlanParams, SspParams};
use crate::optim::extremize;

/// A risk given either as a crisp probability or as a fuzzy number whose cut
/// endpoints enter the two design problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Risk {
    Crisp(f64),
    Fuzzy(FuzzyFraction),
}

impl Risk {
    pub fn cut(&self, nu: f64) -> Result<Interval> {
        match self {
            Risk::Crisp(r) => Ok(Interval::point(*r)),
            Risk::Fuzzy(f) => f.alpha_cut(nu),
        }
    }

    pub fn modal(&self) -> f64 {
        match self {
            Risk::Crisp(r) => *r,
            Risk::Fuzzy(f) => f.modal(),
        }
    }

    fn support(&self) -> Interval {
        match self {
            Risk::Crisp(r) => Interval::point(*r),
            Risk::Fuzzy(f) => f.support(),
        }
    }
}

/// The two points a designed plan must honor: accept at least `1 - alpha` of
/// lots at the acceptable quality and at most `beta` at the limiting quality,
/// judged at cut level `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OCRequirementRepr")]
pub struct OCRequirement {
    aql: FuzzyFraction,
    lql: FuzzyFraction,
    alpha: Risk,
    beta: Risk,
    nu: f64,
}

impl OCRequirement {
    pub fn new(
        aql: FuzzyFraction,
        lql: FuzzyFraction,
        alpha: Risk,
        beta: Risk,
        nu: f64,
    ) -> Result<Self> {
        if aql.modal() >= lql.modal() {
            return Err(Error::Requirement(format!(
                "acceptable quality {} must lie strictly below limiting quality {}",
                aql.modal(),
                lql.modal()
            )));
        }
        for (name, risk) in [("alpha", &alpha), ("beta", &beta)] {
            let s = risk.support();
            if s.lo() <= 0.0 || s.hi() >= 1.0 {
                return Err(Error::Requirement(format!(
                    "risk {name} must lie strictly inside (0, 1), got [{}, {}]",
                    s.lo(),
                    s.hi()
                )));
            }
        }
        if !(0.0..=1.0).contains(&nu) || nu.is_nan() {
            return Err(Error::CutLevel(nu));
        }
        Ok(Self {
            aql,
            lql,
            alpha,
            beta,
            nu,
        })
    }

    /// Crisp requirement: degenerate quality points and crisp risks.
    pub fn crisp(aql: f64, lql: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(
            FuzzyFraction::crisp(aql)?,
            FuzzyFraction::crisp(lql)?,
            Risk::Crisp(alpha),
            Risk::Crisp(beta),
            1.0,
        )
    }

    pub fn aql(&self) -> &FuzzyFraction {
        &self.aql
    }
    pub fn lql(&self) -> &FuzzyFraction {
        &self.lql
    }
    pub fn alpha(&self) -> &Risk {
        &self.alpha
    }
    pub fn beta(&self) -> &Risk {
        &self.beta
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
}

#[derive(Deserialize)]
struct OCRequirementRepr {
    aql: FuzzyFraction,
    lql: FuzzyFraction,
    alpha: Risk,
    beta: Risk,
    #[serde(default = "default_nu")]
    nu: f64,
}

fn default_nu() -> f64 {
    1.0
}

impl TryFrom<OCRequirementRepr> for OCRequirement {
    type Error = Error;

    fn try_from(r: OCRequirementRepr) -> Result<Self> {
        OCRequirement::new(r.aql, r.lql, r.alpha, r.beta, r.nu)
    }
}

/// Bounds of the integer search space.
///
/// `k_max` caps the required deferral count `k`. The published design
/// convention keeps the weakest deferral condition `k = 1` (and hence a
/// single consulted lot for the plain-MDS family); widening `k_max` explores
/// the full generalized family, which often finds strictly smaller samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub n_max: u32,
    pub m_max: u32,
    pub c2_max: u32,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
}

fn default_k_max() -> u32 {
    1
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            n_max: 10_000,
            m_max: 10,
            c2_max: 10,
            k_max: 1,
        }
    }
}

impl SearchLimits {
    fn validate(&self) -> Result<()> {
        if self.n_max == 0 || self.m_max == 0 || self.c2_max == 0 || self.k_max == 0 {
            return Err(Error::Requirement("search limits must be >= 1".into()));
        }
        Ok(())
    }
}

/// The plan a designer settled on, tagged by family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DesignedPlan {
    Gmds { plan: PlanParams },
    Mds { plan: PlanParams },
    Ssp { plan: SspParams },
    Dsp { plan: DspParams },
}

impl DesignedPlan {
    pub fn gmds(&self) -> Option<&PlanParams> {
        match self {
            DesignedPlan::Gmds { plan } | DesignedPlan::Mds { plan } => Some(plan),
            _ => None,
        }
    }

    pub fn ssp(&self) -> Option<&SspParams> {
        match self {
            DesignedPlan::Ssp { plan } => Some(plan),
            _ => None,
        }
    }

    pub fn dsp(&self) -> Option<&DspParams> {
        match self {
            DesignedPlan::Dsp { plan } => Some(plan),
            _ => None,
        }
    }
}

/// Outcome of a design search. Infeasibility is a first-class result: the
/// search never aborts table generation, it reports the binding constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignResult {
    pub feasible: bool,
    pub designed: Option<DesignedPlan>,
    /// Average sample number of the recommended plan. Equals the sample size
    /// for single-sample-per-lot families; quality-dependent for double
    /// sampling (evaluated at the modal acceptable quality).
    pub asn: Option<f64>,
    /// Minimal sample size of the band-lower-endpoint problem.
    pub asn_lower_problem: Option<u32>,
    /// Minimal sample size of the band-upper-endpoint problem.
    pub asn_upper_problem: Option<u32>,
    pub binding_constraint: Option<String>,
}

impl DesignResult {
    fn infeasible(reason: String) -> Self {
        Self {
            feasible: false,
            designed: None,
            asn: None,
            asn_lower_problem: None,
            asn_upper_problem: None,
            binding_constraint: Some(reason),
        }
    }
}

/// One row of the family comparison: ASN of each family for one requirement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: DistModel,
    pub aql_modal: f64,
    pub lql_modal: f64,
    pub ssp: DesignResult,
    pub dsp: DesignResult,
    pub mds: DesignResult,
    pub gmds: DesignResult,
}

/// One of the two optimization problems a fuzzy requirement induces: on the
/// lower band endpoints or on the upper ones.
#[derive(Clone, Copy)]
struct TwoPointProblem {
    aql_cut: Interval,
    lql_cut: Interval,
    /// Acceptance floor at the acceptable quality: `1 - alpha_endpoint`.
    pa_floor: f64,
    /// Acceptance ceiling at the limiting quality: `beta_endpoint`.
    pa_ceiling: f64,
    /// Whether this problem reads the lower band endpoint.
    lower: bool,
}

impl TwoPointProblem {
    fn label(&self) -> &'static str {
        if self.lower {
            "lower-endpoint problem"
        } else {
            "upper-endpoint problem"
        }
    }
}

fn build_problems(req: &OCRequirement) -> Result<[TwoPointProblem; 2]> {
    let aql_cut = req.aql.alpha_cut(req.nu)?;
    let lql_cut = req.lql.alpha_cut(req.nu)?;
    let alpha_cut = req.alpha.cut(req.nu)?;
    let beta_cut = req.beta.cut(req.nu)?;
    Ok([
        TwoPointProblem {
            aql_cut,
            lql_cut,
            pa_floor: 1.0 - alpha_cut.lo(),
            pa_ceiling: beta_cut.lo(),
            lower: true,
        },
        TwoPointProblem {
            aql_cut,
            lql_cut,
            pa_floor: 1.0 - alpha_cut.hi(),
            pa_ceiling: beta_cut.hi(),
            lower: false,
        },
    ])
}

fn problems_coincide(p: &[TwoPointProblem; 2]) -> bool {
    p[0].aql_cut.width() == 0.0
        && p[0].lql_cut.width() == 0.0
        && p[0].pa_floor == p[1].pa_floor
        && p[0].pa_ceiling == p[1].pa_ceiling
}

/// Adapter presenting a fixed interval as the cut of a fuzzy number so the
/// band machinery can be reused over requirement cuts.
struct CutCarrier(Interval);

impl FuzzyNumber for CutCarrier {
    fn alpha_cut(&self, _nu: f64) -> Result<Interval> {
        Ok(self.0)
    }

    fn modal(&self) -> f64 {
        self.0.midpoint()
    }
}

/// Band endpoint of the deferred-state acceptance probability over a cut.
fn gmds_endpoint(cut: Interval, plan: &PlanParams, model: DistModel, lower: bool) -> Result<f64> {
    let band = pa_band(&CutCarrier(cut), 0.0, plan, model)?;
    Ok(if lower { band.lo() } else { band.hi() })
}

/// Result of the inner sample-size search for one parameter configuration.
enum ConfigOutcome {
    Feasible(u32),
    /// The consumer constraint is reachable but the producer constraint
    /// fails everywhere it holds; carries the consumer-minimal sample size
    /// when the search learned it.
    ProducerBinding {
        consumer_min: Option<u32>,
    },
    ConsumerUnreachable,
}

/// Find the minimal `n` in `[n_lo, n_hi]` with `consumer(n) <= ceiling` and
/// `producer(n) >= floor`.
///
/// Both constraint functions are probed for monotone decrease at three
/// points; if the probe passes, the consumer threshold is located by
/// bisection, otherwise the range is scanned linearly. Correctness over
/// speed on non-monotone configurations.
fn min_n_for_config(
    n_lo: u32,
    n_hi: u32,
    ceiling: f64,
    floor: f64,
    mut consumer: impl FnMut(u32) -> Result<f64>,
    mut producer: impl FnMut(u32) -> Result<f64>,
) -> Result<ConfigOutcome> {
    debug_assert!(n_lo <= n_hi);
    let n_mid = n_lo + (n_hi - n_lo) / 2;
    let c_probe = [consumer(n_lo)?, consumer(n_mid)?, consumer(n_hi)?];
    let p_probe = [producer(n_lo)?, producer(n_mid)?, producer(n_hi)?];
    let monotone = c_probe[0] >= c_probe[1]
        && c_probe[1] >= c_probe[2]
        && p_probe[0] >= p_probe[1]
        && p_probe[1] >= p_probe[2];

    if monotone {
        if c_probe[2] > ceiling {
            return Ok(ConfigOutcome::ConsumerUnreachable);
        }
        let (mut lo, mut hi) = (n_lo, n_hi);
        if c_probe[0] <= ceiling {
            hi = n_lo;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if consumer(mid)? <= ceiling {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if producer(hi)? >= floor {
            Ok(ConfigOutcome::Feasible(hi))
        } else {
            Ok(ConfigOutcome::ProducerBinding {
                consumer_min: Some(hi),
            })
        }
    } else {
        let mut first_consumer_ok = None;
        for n in n_lo..=n_hi {
            let c_ok = consumer(n)? <= ceiling;
            if c_ok && first_consumer_ok.is_none() {
                first_consumer_ok = Some(n);
            }
            if c_ok && producer(n)? >= floor {
                return Ok(ConfigOutcome::Feasible(n));
            }
        }
        match first_consumer_ok {
            Some(n) => Ok(ConfigOutcome::ProducerBinding {
                consumer_min: Some(n),
            }),
            None => Ok(ConfigOutcome::ConsumerUnreachable),
        }
    }
}

/// Candidate ordering: minimize `n`, then `m`, then `k`, then `c2`, then
/// `c1`. Deterministic output regardless of search scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct GmdsCandidate {
    n: u32,
    m: u32,
    k: u32,
    c2: u32,
    c1: u32,
}

impl GmdsCandidate {
    fn key(&self) -> (u32, u32, u32, u32, u32) {
        (self.n, self.m, self.k, self.c2, self.c1)
    }

    fn plan(&self) -> PlanParams {
        PlanParams::new(self.n, self.m, self.k, self.c1, self.c2)
            .expect("search space respects plan invariants")
    }
}

/// Solve one two-point problem over the deferred-state configuration grid.
///
/// `force_k_equals_m` restricts the search to the plain multiple deferred
/// state family.
fn solve_gmds_problem(
    problem: &TwoPointProblem,
    model: DistModel,
    limits: &SearchLimits,
    force_k_equals_m: bool,
) -> Result<(Option<GmdsCandidate>, bool)> {
    let mut configs = Vec::new();
    for m in 1..=limits.m_max {
        let ks: Vec<u32> = if force_k_equals_m {
            // Plain MDS consults all m preceding lots; the k cap bounds m.
            if m <= limits.k_max {
                vec![m]
            } else {
                vec![]
            }
        } else {
            (1..=m.min(limits.k_max)).collect()
        };
        for k in ks {
            for c2 in 1..=limits.c2_max.min(limits.n_max) {
                for c1 in 0..c2 {
                    configs.push((m, k, c1, c2));
                }
            }
        }
    }

    let results: Result<Vec<(Option<GmdsCandidate>, bool)>> = configs
        .par_iter()
        .map(|&(m, k, c1, c2)| {
            let n_lo = c2.max(1);
            let eval = |n: u32, cut: Interval| -> Result<f64> {
                let plan = PlanParams::new(n, m, k, c1, c2)
                    .expect("search space respects plan invariants");
                gmds_endpoint(cut, &plan, model, problem.lower)
            };
            let outcome = min_n_for_config(
                n_lo,
                limits.n_max,
                problem.pa_ceiling,
                problem.pa_floor,
                |n| eval(n, problem.lql_cut),
                |n| eval(n, problem.aql_cut),
            )?;
            Ok(match outcome {
                ConfigOutcome::Feasible(n) => (Some(GmdsCandidate { n, m, k, c2, c1 }), true),
                ConfigOutcome::ProducerBinding { .. } => (None, true),
                ConfigOutcome::ConsumerUnreachable => (None, false),
            })
        })
        .collect();

    let mut best: Option<GmdsCandidate> = None;
    let mut consumer_ever = false;
    for (cand, consumer_ok) in results? {
        consumer_ever |= consumer_ok;
        if let Some(c) = cand {
            best = Some(match best {
                Some(b) if b.key() <= c.key() => b,
                _ => c,
            });
        }
    }
    Ok((best, consumer_ever))
}

fn binding_reason(label: &str, consumer_ever: bool) -> String {
    let which = if consumer_ever {
        "producer-risk constraint at the acceptable quality level"
    } else {
        "consumer-risk constraint at the limiting quality level"
    };
    format!("{label}: {which}")
}

fn design_deferred(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
    force_k_equals_m: bool,
) -> Result<DesignResult> {
    limits.validate()?;
    let problems = build_problems(req)?;
    let (best_lower, consumer_lower) =
        solve_gmds_problem(&problems[0], model, limits, force_k_equals_m)?;
    let (best_upper, consumer_upper) = if problems_coincide(&problems) {
        (best_lower, consumer_lower)
    } else {
        solve_gmds_problem(&problems[1], model, limits, force_k_equals_m)?
    };

    let (lower, upper) = match (best_lower, best_upper) {
        (Some(l), Some(u)) => (l, u),
        (None, _) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[0].label(),
                consumer_lower,
            )))
        }
        (_, None) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[1].label(),
                consumer_upper,
            )))
        }
    };

    // Recommend the conservative (larger sample) of the two problem minima.
    let (recommended, its_problem) = if upper.n > lower.n {
        (upper, &problems[1])
    } else {
        (lower, &problems[0])
    };
    let plan = recommended.plan();

    // Round-trip: the returned plan must satisfy its problem's constraints
    // when re-evaluated through the band machinery.
    let at_aql = gmds_endpoint(its_problem.aql_cut, &plan, model, its_problem.lower)?;
    let at_lql = gmds_endpoint(its_problem.lql_cut, &plan, model, its_problem.lower)?;
    if at_aql < its_problem.pa_floor - 1e-9 || at_lql > its_problem.pa_ceiling + 1e-9 {
        return Err(Error::Inconsistency(format!(
            "designed plan {plan:?} fails re-verification: pa(aql)={at_aql}, pa(lql)={at_lql}"
        )));
    }

    let designed = if force_k_equals_m {
        DesignedPlan::Mds { plan }
    } else {
        DesignedPlan::Gmds { plan }
    };
    Ok(DesignResult {
        feasible: true,
        designed: Some(designed),
        asn: Some(f64::from(plan.asn())),
        asn_lower_problem: Some(lower.n),
        asn_upper_problem: Some(upper.n),
        binding_constraint: None,
    })
}

/// Design the generalized deferred-state plan for a two-point requirement.
pub fn design_gmds(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<DesignResult> {
    design_deferred(req, model, limits, false)
}

/// Design the plain multiple deferred state plan (`k = m`).
pub fn design_mds(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<DesignResult> {
    design_deferred(req, model, limits, true)
}

/// Single-sampling acceptance endpoint over a cut.
///
/// The tail probability is monotone decreasing in the fraction, so the band
/// endpoints are the evaluations at the cut endpoints.
fn ssp_endpoint(cut: Interval, ssp: &SspParams, model: DistModel, lower: bool) -> Result<f64> {
    if lower {
        pa_ssp(cut.hi(), ssp, model)
    } else {
        pa_ssp(cut.lo(), ssp, model)
    }
}

fn solve_ssp_problem(
    problem: &TwoPointProblem,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<(Option<SspParams>, bool)> {
    // Safety stop; the consumer-minimal n grows with c, so the loop exits as
    // soon as no smaller sample size is reachable.
    const C_CAP: u32 = 2_000;

    let mut best: Option<SspParams> = None;
    let mut consumer_ever = false;
    for c in 0..=C_CAP {
        let n_lo = c.max(1);
        if n_lo > limits.n_max {
            break;
        }
        if let Some(b) = &best {
            if n_lo > b.n() {
                break;
            }
        }
        let eval = |n: u32, cut: Interval| -> Result<f64> {
            let ssp = SspParams::new(n, c).expect("c <= n holds by construction");
            ssp_endpoint(cut, &ssp, model, problem.lower)
        };
        let outcome = min_n_for_config(
            n_lo,
            limits.n_max,
            problem.pa_ceiling,
            problem.pa_floor,
            |n| eval(n, problem.lql_cut),
            |n| eval(n, problem.aql_cut),
        )?;
        match outcome {
            ConfigOutcome::Feasible(n) => {
                consumer_ever = true;
                let cand = SspParams::new(n, c).expect("valid by construction");
                let better = match &best {
                    Some(b) => (cand.n(), cand.c()) < (b.n(), b.c()),
                    None => true,
                };
                if better {
                    best = Some(cand);
                }
                // Larger c only needs more samples against the consumer
                // constraint; nothing below the current best remains.
                if let Some(b) = &best {
                    if n >= b.n() && c > b.c() {
                        break;
                    }
                }
            }
            ConfigOutcome::ProducerBinding { consumer_min } => {
                consumer_ever = true;
                if let (Some(b), Some(cm)) = (&best, consumer_min) {
                    if cm > b.n() {
                        break;
                    }
                }
            }
            ConfigOutcome::ConsumerUnreachable => break,
        }
    }
    Ok((best, consumer_ever))
}

/// Design the single sampling plan for a two-point requirement.
pub fn design_ssp(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<DesignResult> {
    limits.validate()?;
    let problems = build_problems(req)?;
    let (best_lower, consumer_lower) = solve_ssp_problem(&problems[0], model, limits)?;
    let (best_upper, consumer_upper) = if problems_coincide(&problems) {
        (best_lower, consumer_lower)
    } else {
        solve_ssp_problem(&problems[1], model, limits)?
    };

    let (lower, upper) = match (best_lower, best_upper) {
        (Some(l), Some(u)) => (l, u),
        (None, _) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[0].label(),
                consumer_lower,
            )))
        }
        (_, None) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[1].label(),
                consumer_upper,
            )))
        }
    };
    let recommended = if upper.n() > lower.n() { upper } else { lower };
    Ok(DesignResult {
        feasible: true,
        designed: Some(DesignedPlan::Ssp { plan: recommended }),
        asn: Some(f64::from(recommended.n())),
        asn_lower_problem: Some(lower.n()),
        asn_upper_problem: Some(upper.n()),
        binding_constraint: None,
    })
}

/// Double-sampling acceptance endpoint over a cut, by bounded extremization
/// (no monotonicity assumed for the two-stage scheme).
fn dsp_endpoint(cut: Interval, dsp: &DspParams, model: DistModel, lower: bool) -> Result<f64> {
    let band = extremize(|p| pa_dsp(p, dsp, model), cut, 257, 1e-8)?;
    Ok(if lower { band.lo() } else { band.hi() })
}

fn solve_dsp_problem(
    problem: &TwoPointProblem,
    model: DistModel,
    limits: &SearchLimits,
    aql_modal: f64,
) -> Result<(Option<(DspParams, f64)>, bool)> {
    let mut pairs = Vec::new();
    for c2 in 1..=limits.c2_max {
        for c1 in 0..c2 {
            pairs.push((c1, c2));
        }
    }
    type DspCandidate = Option<(DspParams, f64)>;
    let results: Result<Vec<(DspCandidate, bool)>> = pairs
        .par_iter()
        .map(|&(c1, c2)| {
            let eval = |n: u32, cut: Interval| -> Result<f64> {
                let dsp = DspParams::new(n, n, c1, c2).expect("validated bounds");
                dsp_endpoint(cut, &dsp, model, problem.lower)
            };
            let outcome = min_n_for_config(
                1,
                limits.n_max,
                problem.pa_ceiling,
                problem.pa_floor,
                |n| eval(n, problem.lql_cut),
                |n| eval(n, problem.aql_cut),
            )?;
            Ok(match outcome {
                ConfigOutcome::Feasible(n) => {
                    let dsp = DspParams::new(n, n, c1, c2).expect("validated bounds");
                    let asn = asn_dsp(aql_modal, &dsp, model)?;
                    (Some((dsp, asn)), true)
                }
                ConfigOutcome::ProducerBinding { .. } => (None, true),
                ConfigOutcome::ConsumerUnreachable => (None, false),
            })
        })
        .collect();

    // Minimize the common stage size; settle ties by the reported ASN, then
    // by the acceptance numbers.
    let mut best: Option<(DspParams, f64)> = None;
    let mut consumer_ever = false;
    for (cand, consumer_ok) in results? {
        consumer_ever |= consumer_ok;
        if let Some((dsp, asn)) = cand {
            let better = match &best {
                Some((b, b_asn)) => {
                    (dsp.n1(), asn, dsp.c2(), dsp.c1()) < (b.n1(), *b_asn, b.c2(), b.c1())
                }
                None => true,
            };
            if better {
                best = Some((dsp, asn));
            }
        }
    }
    Ok((best, consumer_ever))
}

/// Design the double sampling plan (equal stage sizes) for a two-point
/// requirement. The common stage size is minimized and the quality-dependent
/// average sample number is reported at the modal acceptable quality.
pub fn design_dsp(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<DesignResult> {
    limits.validate()?;
    let problems = build_problems(req)?;
    let aql_modal = req.aql.modal();
    let (best_lower, consumer_lower) = solve_dsp_problem(&problems[0], model, limits, aql_modal)?;
    let (best_upper, consumer_upper) = if problems_coincide(&problems) {
        (best_lower, consumer_lower)
    } else {
        solve_dsp_problem(&problems[1], model, limits, aql_modal)?
    };

    let (lower, upper) = match (best_lower, best_upper) {
        (Some(l), Some(u)) => (l, u),
        (None, _) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[0].label(),
                consumer_lower,
            )))
        }
        (_, None) => {
            return Ok(DesignResult::infeasible(binding_reason(
                problems[1].label(),
                consumer_upper,
            )))
        }
    };
    let recommended = if upper.0.n1() > lower.0.n1() {
        upper
    } else {
        lower
    };
    Ok(DesignResult {
        feasible: true,
        designed: Some(DesignedPlan::Dsp {
            plan: recommended.0,
        }),
        asn: Some(recommended.1),
        asn_lower_problem: Some(lower.0.n1()),
        asn_upper_problem: Some(upper.0.n1()),
        binding_constraint: None,
    })
}

/// Design all four families for one requirement and assemble a comparison
/// row. Generalizing `k <= m` can only enlarge the feasible set, so the
/// deferred-state ASN never exceeds the plain-MDS ASN; that containment is
/// verified before returning.
pub fn compare_asn(
    req: &OCRequirement,
    model: DistModel,
    limits: &SearchLimits,
) -> Result<ComparisonRow> {
    let ssp = design_ssp(req, model, limits)?;
    let dsp = design_dsp(req, model, limits)?;
    let mds = design_mds(req, model, limits)?;
    let gmds = design_gmds(req, model, limits)?;

    if let (Some(g), Some(m)) = (gmds.asn, mds.asn) {
        if g > m {
            return Err(Error::Inconsistency(format!(
                "deferred-state ASN {g} exceeds plain-MDS ASN {m} for the same requirement"
            )));
        }
    }

    Ok(ComparisonRow {
        model,
        aql_modal: req.aql.modal(),
        lql_modal: req.lql.modal(),
        ssp,
        dsp,
        mds,
        gmds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::TriangularFuzzy;

    fn limits() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn requirement_validation() {
        assert!(OCRequirement::crisp(0.01, 0.04, 0.05, 0.10).is_ok());
        // Limiting quality below acceptable quality is ill-posed.
        assert!(matches!(
            OCRequirement::crisp(0.04, 0.01, 0.05, 0.10),
            Err(Error::Requirement(_))
        ));
        assert!(OCRequirement::crisp(0.01, 0.04, 0.0, 0.10).is_err());
        assert!(OCRequirement::crisp(0.01, 0.04, 0.05, 1.0).is_err());
    }

    #[test]
    fn requirement_json_accepts_crisp_and_fuzzy_risks() {
        let req: OCRequirement = serde_json::from_str(
            r#"{
                "aql": {"kind":"triangular","points":[0.004,0.005,0.006]},
                "lql": {"kind":"triangular","points":[0.09,0.10,0.11]},
                "alpha": 0.05,
                "beta": {"kind":"triangular","points":[0.08,0.10,0.12]},
                "nu": 0.5
            }"#,
        )
        .unwrap();
        assert_eq!(req.alpha().modal(), 0.05);
        assert_eq!(req.beta().modal(), 0.10);
    }

    #[test]
    fn crisp_design_matches_published_row() {
        let req = OCRequirement::crisp(0.005, 0.10, 0.05, 0.10).unwrap();
        let res = design_gmds(&req, DistModel::Binomial, &limits()).unwrap();
        assert!(res.feasible);
        let plan = res.designed.unwrap().gmds().copied().unwrap();
        assert_eq!(
            (plan.n(), plan.m(), plan.k(), plan.c1(), plan.c2()),
            (24, 1, 1, 0, 1)
        );
        assert_eq!(res.asn_lower_problem, res.asn_upper_problem);
    }

    #[test]
    fn mds_design_enforces_k_equals_m() {
        let req = OCRequirement::crisp(0.001, 0.010, 0.05, 0.10).unwrap();
        let res = design_mds(&req, DistModel::Binomial, &limits()).unwrap();
        let plan = res.designed.unwrap().gmds().copied().unwrap();
        assert_eq!(plan.k(), plan.m());

        // Widening the deferral cap can only shrink the optimum; with k up
        // to 3 the known (n=388, m=3, k=3, c1=1, c2=2) plan is reachable.
        let wide = SearchLimits {
            k_max: 3,
            ..SearchLimits::default()
        };
        let res_wide = design_mds(&req, DistModel::Binomial, &wide).unwrap();
        let plan_wide = res_wide.designed.unwrap().gmds().copied().unwrap();
        assert!(plan_wide.n() <= plan.n());
        assert_eq!(plan_wide.n(), 388);
    }

    #[test]
    fn ssp_design_matches_exhaustive_oracle_on_loose_requirement() {
        // Trivially loose requirement: brute force over a small grid agrees.
        let req = OCRequirement::crisp(0.02, 0.30, 0.5, 0.5).unwrap();
        let res = design_ssp(&req, DistModel::Binomial, &limits()).unwrap();
        let got = res.designed.unwrap().ssp().copied().unwrap();

        let mut brute: Option<(u32, u32)> = None;
        'outer: for n in 1..=100u32 {
            for c in 0..=n.min(5) {
                let ssp = SspParams::new(n, c).unwrap();
                let at_aql = pa_ssp(0.02, &ssp, DistModel::Binomial).unwrap();
                let at_lql = pa_ssp(0.30, &ssp, DistModel::Binomial).unwrap();
                if at_aql >= 0.5 && at_lql <= 0.5 {
                    brute = Some((n, c));
                    break 'outer;
                }
            }
        }
        let (bn, bc) = brute.expect("loose requirement must be feasible");
        assert_eq!((got.n(), got.c()), (bn, bc));
    }

    #[test]
    fn dsp_design_matches_exhaustive_oracle_on_small_grid() {
        let req = OCRequirement::crisp(0.02, 0.25, 0.30, 0.30).unwrap();
        let small = SearchLimits {
            n_max: 60,
            m_max: 10,
            c2_max: 3,
            k_max: 1,
        };
        let res = design_dsp(&req, DistModel::Binomial, &small).unwrap();
        let got = res.designed.unwrap().dsp().copied().unwrap();

        let mut brute: Option<u32> = None;
        'outer: for n in 1..=60u32 {
            for c2 in 1..=3u32 {
                for c1 in 0..c2 {
                    let dsp = DspParams::new(n, n, c1, c2).unwrap();
                    let at_aql = pa_dsp(0.02, &dsp, DistModel::Binomial).unwrap();
                    let at_lql = pa_dsp(0.25, &dsp, DistModel::Binomial).unwrap();
                    if at_aql >= 0.70 && at_lql <= 0.30 {
                        brute = Some(n);
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(got.n1(), brute.expect("requirement must be feasible"));
    }

    #[test]
    fn infeasible_requirement_is_a_first_class_result() {
        // Absurdly tight: quality points nearly coincide, tiny risks, and a
        // sample-size ceiling that cannot separate them.
        let req = OCRequirement::crisp(0.010, 0.0101, 0.01, 0.01).unwrap();
        let tight = SearchLimits {
            n_max: 200,
            m_max: 3,
            c2_max: 3,
            k_max: 3,
        };
        let res = design_gmds(&req, DistModel::Binomial, &tight).unwrap();
        assert!(!res.feasible);
        assert!(res.designed.is_none());
        let reason = res.binding_constraint.unwrap();
        assert!(reason.contains("constraint"), "reason: {reason}");
    }

    #[test]
    fn fuzzy_design_reports_both_problem_minima() {
        let aql: FuzzyFraction = TriangularFuzzy::new(0.004, 0.005, 0.006).unwrap().into();
        let lql: FuzzyFraction = TriangularFuzzy::new(0.09, 0.10, 0.11).unwrap().into();
        let req = OCRequirement::new(aql, lql, Risk::Crisp(0.05), Risk::Crisp(0.10), 0.5).unwrap();
        let res = design_gmds(&req, DistModel::Binomial, &limits()).unwrap();
        assert!(res.feasible);
        let lower = res.asn_lower_problem.unwrap();
        let upper = res.asn_upper_problem.unwrap();
        let plan = res.designed.unwrap().gmds().copied().unwrap();
        assert_eq!(plan.n(), lower.max(upper));
    }

    #[test]
    fn comparison_row_has_containment() {
        let req = OCRequirement::crisp(0.01, 0.05, 0.05, 0.10).unwrap();
        let row = compare_asn(&req, DistModel::Binomial, &limits()).unwrap();
        let gmds = row.gmds.asn.unwrap();
        let mds = row.mds.asn.unwrap();
        assert!(gmds <= mds);
        // Published comparison row: (132, ~103.2, 87, 62).
        assert!((row.ssp.asn.unwrap() - 132.0).abs() <= 2.0);
        assert!((mds - 87.0).abs() <= 2.0);
        assert!((gmds - 62.0).abs() <= 2.0);
    }
}
