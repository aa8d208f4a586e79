//! Monte Carlo lot-stream simulator: runs the deferred-state operating
//! procedure verbatim and measures the long-run acceptance fraction,
//! providing an independent check of the analytic kernel and of the
//! misclassification transform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzyprob::InspectionErrors;
use crate::kernels::{DistModel, PlanParams};

/// Counted lots per random stream. Shard layout depends only on the
/// configuration, so results are bit-identical across worker counts.
const SHARD_LOTS: u64 = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// True defect fraction of the process.
    pub p: f64,
    pub plan: PlanParams,
    pub model: DistModel,
    /// Stream length; `lots - warmup` lots are counted.
    pub lots: u64,
    /// Discarded lots at the head of each stream; at least `m` so the
    /// all-accepted initial history washes out.
    pub warmup: u64,
    pub seed: u64,
    #[serde(default)]
    pub errors: Option<InspectionErrors>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub accept_rate: f64,
    pub stderr: f64,
    pub lots_counted: u64,
}

/// One simulated lot, for debugging traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LotTrace {
    pub lot: u64,
    pub defects: u64,
    pub first_stage: bool,
    pub accepted: bool,
    pub warmup: bool,
}

fn validate(cfg: &SimConfig) -> Result<()> {
    if !(0.0..=1.0).contains(&cfg.p) || cfg.p.is_nan() {
        return Err(Error::FractionRange {
            what: "p",
            value: cfg.p,
        });
    }
    if cfg.lots <= cfg.warmup {
        return Err(Error::Simulation(format!(
            "stream length {} must exceed warmup {}",
            cfg.lots, cfg.warmup
        )));
    }
    if cfg.warmup < u64::from(cfg.plan.m()) {
        return Err(Error::Simulation(format!(
            "warmup {} must cover the {} preceding lots the plan consults",
            cfg.warmup,
            cfg.plan.m()
        )));
    }
    Ok(())
}

/// Per-lot defect-count sampler.
///
/// Binomial lots misclassify at the item level: each truly defective item is
/// seen defective with probability `1 - delta2`, each good item with
/// probability `delta1`, so the observed count composes three binomial
/// draws. Poisson lots are not individuated and use the transformed rate.
struct LotSampler {
    n: u64,
    model: DistModel,
    p: f64,
    errors: Option<InspectionErrors>,
    poisson_lambda: f64,
}

impl LotSampler {
    fn new(cfg: &SimConfig) -> Self {
        let rate = match (cfg.model, &cfg.errors) {
            (DistModel::Poisson, Some(e)) => e.apparent_rate(cfg.p),
            _ => cfg.p,
        };
        Self {
            n: u64::from(cfg.plan.n()),
            model: cfg.model,
            p: cfg.p,
            errors: cfg.errors,
            poisson_lambda: cfg.plan.n() as f64 * rate,
        }
    }

    fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p)
            .expect("p validated to [0, 1]")
            .sample(rng)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self.model {
            DistModel::Binomial => {
                let true_defects = Self::binomial(rng, self.n, self.p);
                match &self.errors {
                    None => true_defects,
                    Some(e) => {
                        let seen = Self::binomial(rng, true_defects, 1.0 - e.delta2());
                        let false_alarms = Self::binomial(rng, self.n - true_defects, e.delta1());
                        seen + false_alarms
                    }
                }
            }
            DistModel::Poisson => {
                if self.poisson_lambda == 0.0 {
                    0
                } else {
                    Poisson::new(self.poisson_lambda)
                        .expect("lambda > 0")
                        .sample(rng) as u64
                }
            }
        }
    }
}

/// First-stage history of the `m` preceding lots, initialized all-accepted.
struct History {
    flags: Vec<bool>,
    next: usize,
    count: u32,
}

impl History {
    fn new(m: u32) -> Self {
        Self {
            flags: vec![true; m as usize],
            next: 0,
            count: m,
        }
    }

    fn count(&self) -> u32 {
        self.count
    }

    fn push(&mut self, flag: bool) {
        let old = self.flags[self.next];
        self.flags[self.next] = flag;
        self.next = (self.next + 1) % self.flags.len();
        self.count = self.count - u32::from(old) + u32::from(flag);
    }
}

/// Run one lot through the operating procedure; returns
/// `(accepted, first_stage_flag)`.
fn step(d: u64, plan: &PlanParams, history: &History) -> (bool, bool) {
    let first_stage = d <= u64::from(plan.c1());
    let accepted = if first_stage {
        true
    } else if d > u64::from(plan.c2()) {
        false
    } else {
        history.count() >= plan.k()
    };
    (accepted, first_stage)
}

fn run_shard(cfg: &SimConfig, stream: u64, quota: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let sampler = LotSampler::new(cfg);
    let mut history = History::new(cfg.plan.m());
    for _ in 0..cfg.warmup {
        let d = sampler.draw(&mut rng);
        let (_, flag) = step(d, &cfg.plan, &history);
        history.push(flag);
    }
    let mut accepts = 0u64;
    for _ in 0..quota {
        let d = sampler.draw(&mut rng);
        let (accepted, flag) = step(d, &cfg.plan, &history);
        history.push(flag);
        accepts += u64::from(accepted);
    }
    accepts
}

/// Long-run acceptance fraction of the simulated lot stream.
///
/// The deferred-state chain is sequential within a stream; the counted lots
/// are split into fixed-size shards on independent seeded streams whose
/// counts are pooled, so a fixed seed gives bit-identical results across
/// runs and worker counts.
pub fn simulate_gmds(cfg: &SimConfig) -> Result<SimResult> {
    validate(cfg)?;
    let counted = cfg.lots - cfg.warmup;
    let full_shards = counted / SHARD_LOTS;
    let remainder = counted % SHARD_LOTS;
    let mut shards: Vec<(u64, u64)> = (0..full_shards).map(|i| (i, SHARD_LOTS)).collect();
    if remainder > 0 {
        shards.push((full_shards, remainder));
    }

    let accepts: u64 = shards
        .par_iter()
        .map(|&(stream, quota)| run_shard(cfg, stream, quota))
        .sum();

    let rate = accepts as f64 / counted as f64;
    Ok(SimResult {
        accept_rate: rate,
        stderr: (rate * (1.0 - rate) / counted as f64).sqrt(),
        lots_counted: counted,
    })
}

/// Sequential single-stream trace of the first `max_rows` lots (warmup
/// included), for debugging the chain mechanics.
pub fn simulate_gmds_trace(cfg: &SimConfig, max_rows: u64) -> Result<Vec<LotTrace>> {
    validate(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let sampler = LotSampler::new(cfg);
    let mut history = History::new(cfg.plan.m());
    let total = cfg.lots.min(max_rows);
    let mut rows = Vec::with_capacity(total as usize);
    for lot in 0..total {
        let d = sampler.draw(&mut rng);
        let (accepted, flag) = step(d, &cfg.plan, &history);
        history.push(flag);
        rows.push(LotTrace {
            lot,
            defects: d,
            first_stage: flag,
            accepted,
            warmup: lot < cfg.warmup,
        });
    }
    Ok(rows)
}
