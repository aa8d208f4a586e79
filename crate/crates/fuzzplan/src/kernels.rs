//! Numerically stable crisp acceptance-probability kernels.
//!
//! Tail sums run an incremental term recurrence in linear space and fall back
//! to log-space accumulation when the leading term underflows, which keeps
//! them usable for sample sizes up to 1e5 without factorial overflow.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution model for the defect count in a sample of size `n`.
///
/// The Poisson model uses mean `lambda = n * p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistModel {
    Binomial,
    Poisson,
}

/// Parameters `(n, m, k, c1, c2)` of a multiple deferred state plan.
///
/// `n` is the per-lot sample size, `m` the number of preceding lots
/// consulted, `k` the required count of first-stage acceptances among them,
/// `c1` the unconditional and `c2` the conditional acceptance number.
/// `c1 = c2` is admitted as the degenerate case in which the conditional
/// stage vanishes and the plan behaves as single sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PlanParamsRepr")]
pub struct PlanParams {
    n: u32,
    m: u32,
    k: u32,
    c1: u32,
    c2: u32,
}

impl PlanParams {
    pub fn new(n: u32, m: u32, k: u32, c1: u32, c2: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Plan("sample size n must be positive".into()));
        }
        if k == 0 || k > m {
            return Err(Error::Plan(format!(
                "require 1 <= k <= m, got k={k}, m={m}"
            )));
        }
        if c1 > c2 {
            return Err(Error::Plan(format!(
                "require c1 <= c2, got c1={c1}, c2={c2}"
            )));
        }
        if c2 > n {
            return Err(Error::Plan(format!("require c2 <= n, got c2={c2}, n={n}")));
        }
        Ok(Self { n, m, k, c1, c2 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn c1(&self) -> u32 {
        self.c1
    }
    pub fn c2(&self) -> u32 {
        self.c2
    }

    /// Average sample number of the plan; a single sample decides each lot.
    pub fn asn(&self) -> u32 {
        self.n
    }
}

#[derive(Deserialize)]
struct PlanParamsRepr {
    n: u32,
    m: u32,
    k: u32,
    c1: u32,
    c2: u32,
}

impl TryFrom<PlanParamsRepr> for PlanParams {
    type Error = Error;

    fn try_from(r: PlanParamsRepr) -> Result<Self> {
        PlanParams::new(r.n, r.m, r.k, r.c1, r.c2)
    }
}

/// Single sampling plan `(n, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SspParamsRepr")]
pub struct SspParams {
    n: u32,
    c: u32,
}

impl SspParams {
    pub fn new(n: u32, c: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Plan("sample size n must be positive".into()));
        }
        if c > n {
            return Err(Error::Plan(format!("require c <= n, got c={c}, n={n}")));
        }
        Ok(Self { n, c })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn c(&self) -> u32 {
        self.c
    }
}

#[derive(Deserialize)]
struct SspParamsRepr {
    n: u32,
    c: u32,
}

impl TryFrom<SspParamsRepr> for SspParams {
    type Error = Error;

    fn try_from(r: SspParamsRepr) -> Result<Self> {
        SspParams::new(r.n, r.c)
    }
}

/// Double sampling plan with equal stage sizes `n1 = n2` by convention:
/// accept at stage one iff `d1 <= c1`, reject iff `d1 > c2`, otherwise draw
/// the second sample and accept iff `d1 + d2 <= c2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DspParamsRepr")]
pub struct DspParams {
    n1: u32,
    n2: u32,
    c1: u32,
    c2: u32,
}

impl DspParams {
    pub fn new(n1: u32, n2: u32, c1: u32, c2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Plan("stage sizes must be positive".into()));
        }
        if c1 >= c2 {
            return Err(Error::Plan(format!(
                "require c1 < c2, got c1={c1}, c2={c2}"
            )));
        }
        Ok(Self { n1, n2, c1, c2 })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }
    pub fn n2(&self) -> u32 {
        self.n2
    }
    pub fn c1(&self) -> u32 {
        self.c1
    }
    pub fn c2(&self) -> u32 {
        self.c2
    }
}

#[derive(Deserialize)]
struct DspParamsRepr {
    n1: u32,
    n2: u32,
    c1: u32,
    c2: u32,
}

impl TryFrom<DspParamsRepr> for DspParams {
    type Error = Error;

    fn try_from(r: DspParamsRepr) -> Result<Self> {
        DspParams::new(r.n1, r.n2, r.c1, r.c2)
    }
}

fn check_fraction(what: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::FractionRange { what, value: p });
    }
    Ok(())
}

/// ln(n!) with an exact prefix table and a Stirling tail.
fn ln_factorial(n: u64) -> f64 {
    const TABLE_LEN: usize = 1024;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        for k in 1..TABLE_LEN as u64 {
            t.push(t[(k - 1) as usize] + (k as f64).ln());
        }
        t
    });
    if (n as usize) < TABLE_LEN {
        return table[n as usize];
    }
    // Stirling series for ln Gamma(x) at x = n + 1.
    let x = n as f64 + 1.0;
    let x2 = x * x;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x * x2 * x2)
}

/// Clamp a probability into `[0, 1]`, absorbing only floating-point residue.
///
/// `terms` scales the admitted slack with the length of the sum that
/// produced the value; anything beyond that is a genuine bug.
fn clamp_unit(x: f64, terms: u64) -> Result<f64> {
    let slack = (terms.max(1) as f64 * 4.0 * f64::EPSILON).max(1e-14);
    if x < -slack || x > 1.0 + slack {
        return Err(Error::Inconsistency(format!(
            "probability {x} strays outside [0, 1] beyond rounding slack {slack:e}"
        )));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Binomial pmf values `P(d = 0), ..., P(d = c)` for `d ~ Bin(n, p)`.
fn binomial_pmf_upto(c: u32, n: u32, p: f64) -> Vec<f64> {
    let len = (c + 1) as usize;
    if p == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    if p == 1.0 {
        let mut v = vec![0.0; len];
        if c >= n {
            v[n as usize] = 1.0;
        }
        return v;
    }
    let nf = f64::from(n);
    let t0 = (nf * (-p).ln_1p()).exp();
    if t0 > 0.0 && t0.is_normal() {
        let r = p / (1.0 - p);
        let mut v = Vec::with_capacity(len);
        let mut t = t0;
        v.push(t);
        for d in 0..c.min(n) {
            t *= (nf - f64::from(d)) / f64::from(d + 1) * r;
            v.push(t);
        }
        v.resize(len, 0.0);
        return v;
    }
    // Leading term underflowed; evaluate each term in log space.
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    (0..=c)
        .map(|d| {
            if d > n {
                return 0.0;
            }
            let df = f64::from(d);
            (ln_factorial(u64::from(n))
                - ln_factorial(u64::from(d))
                - ln_factorial(u64::from(n - d))
                + df * ln_p
                + (nf - df) * ln_q)
                .exp()
        })
        .collect()
}

/// Poisson pmf values `P(d = 0), ..., P(d = c)` for `d ~ Poisson(lambda)`.
fn poisson_pmf_upto(c: u32, lambda: f64) -> Vec<f64> {
    let len = (c + 1) as usize;
    if lambda == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    let t0 = (-lambda).exp();
    if t0 > 0.0 && t0.is_normal() {
        let mut v = Vec::with_capacity(len);
        let mut t = t0;
        v.push(t);
        for d in 0..c {
            t *= lambda / f64::from(d + 1);
            v.push(t);
        }
        return v;
    }
    let ln_l = lambda.ln();
    (0..=c)
        .map(|d| (-lambda + f64::from(d) * ln_l - ln_factorial(u64::from(d))).exp())
        .collect()
}

fn pmf_upto(c: u32, n: u32, p: f64, model: DistModel) -> Vec<f64> {
    match model {
        DistModel::Binomial => binomial_pmf_upto(c, n, p),
        DistModel::Poisson => poisson_pmf_upto(c, f64::from(n) * p),
    }
}

/// `P(d <= c)` for the defect count of a sample of size `n` at fraction `p`.
///
/// Binomial requires `c <= n`; the Poisson model has no finite support and
/// admits any `c`.
pub fn tail_cdf(c: u32, n: u32, p: f64, model: DistModel) -> Result<f64> {
    check_fraction("p", p)?;
    if n == 0 {
        return Err(Error::Plan("sample size n must be positive".into()));
    }
    if model == DistModel::Binomial {
        if c > n {
            return Err(Error::Plan(format!("require c <= n, got c={c}, n={n}")));
        }
        if c == n {
            return Ok(1.0);
        }
    }
    let sum = pmf_upto(c, n, p, model).iter().sum();
    clamp_unit(sum, u64::from(c) + 1)
}

/// Acceptance probability of the deferred-state plan at crisp fraction `p`.
///
/// `P_a = P(d <= c1) + P(c1 < d <= c2) * P(at least k of m first-stage
/// acceptances)`, where the deferred mixture is binomial in the first-stage
/// acceptance probability.
pub fn pa_gmds(p: f64, plan: &PlanParams, model: DistModel) -> Result<f64> {
    check_fraction("p", p)?;
    let a = tail_cdf(plan.c1, plan.n, p, model)?;
    if plan.c1 == plan.c2 {
        // Degenerate conditional stage: exactly single sampling.
        return Ok(a);
    }
    let b = tail_cdf(plan.c2, plan.n, p, model)?;
    let conditional = (b - a).max(0.0);
    // P(at least k of m) = 1 - P(Bin(m, a) <= k - 1); reuses the stable tail.
    let mixture = 1.0 - tail_cdf(plan.k - 1, plan.m, a, DistModel::Binomial)?;
    clamp_unit(
        a + conditional * mixture,
        u64::from(plan.c2) + u64::from(plan.m) + 2,
    )
}

/// Acceptance probability of the single sampling plan: `P(d <= c)`.
pub fn pa_ssp(p: f64, ssp: &SspParams, model: DistModel) -> Result<f64> {
    tail_cdf(ssp.c, ssp.n, p, model)
}

/// Acceptance probability of the double sampling plan.
///
/// `P(d1 <= c1) + sum_{d1 = c1+1}^{c2} P(d1) * P(d2 <= c2 - d1 over n2)`.
pub fn pa_dsp(p: f64, dsp: &DspParams, model: DistModel) -> Result<f64> {
    check_fraction("p", p)?;
    let stage1 = pmf_upto(dsp.c2, dsp.n1, p, model);
    let mut pa: f64 = stage1[..=dsp.c1 as usize].iter().sum();
    for d1 in (dsp.c1 + 1)..=dsp.c2 {
        let c_rem = dsp.c2 - d1;
        // A binomial second stage of size n2 cannot exceed n2 defectives;
        // a remaining allowance at or above n2 accepts with certainty.
        let c_eff = match model {
            DistModel::Binomial => c_rem.min(dsp.n2),
            DistModel::Poisson => c_rem,
        };
        pa += stage1[d1 as usize] * tail_cdf(c_eff, dsp.n2, p, model)?;
    }
    clamp_unit(pa, u64::from(dsp.c2) * 2 + 2)
}

/// Average sample number of the double sampling plan at fraction `p`:
/// `n1 + n2 * P(c1 < d1 <= c2)`.
pub fn asn_dsp(p: f64, dsp: &DspParams, model: DistModel) -> Result<f64> {
    check_fraction("p", p)?;
    let clamp = |c: u32| match model {
        DistModel::Binomial => c.min(dsp.n1),
        DistModel::Poisson => c,
    };
    let lo = tail_cdf(clamp(dsp.c1), dsp.n1, p, model)?;
    let hi = tail_cdf(clamp(dsp.c2), dsp.n1, p, model)?;
    Ok(f64::from(dsp.n1) + f64::from(dsp.n2) * (hi - lo).max(0.0))
}
