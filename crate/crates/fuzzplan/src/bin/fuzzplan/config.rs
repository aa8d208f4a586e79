//! One config-file schema shared by all subcommands, discriminated by a
//! `task` field; command-line flags override file fields.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use fuzzplan::design::{Risk, SearchLimits};
use fuzzplan::fuzzy::FuzzyFraction;
use fuzzplan::fuzzyprob::InspectionErrors;
use fuzzplan::kernels::{DistModel, PlanParams};
use fuzzplan::{PentagonalFuzzy, TriangularFuzzy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gmds,
    Mds,
    Ssp,
    Dsp,
}

/// Everything a config file may carry; each subcommand picks the fields it
/// needs and validates them together.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema_version: Option<u32>,
    pub task: Option<String>,

    // Evaluation-style tasks.
    pub fuzzy: Option<FuzzyFraction>,
    pub plan: Option<PlanParams>,
    pub model: Option<DistModel>,
    pub nu: Option<f64>,
    pub nu_levels: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
    pub lot_size: Option<u32>,
    pub errors: Option<InspectionErrors>,

    // Design-style tasks.
    pub aql: Option<FuzzyFraction>,
    pub lql: Option<FuzzyFraction>,
    pub alpha: Option<Risk>,
    pub beta: Option<Risk>,
    pub limits: Option<SearchLimits>,
    pub family: Option<Family>,

    // Simulation.
    pub p: Option<f64>,
    pub lots: Option<u64>,
    pub warmup: Option<u64>,
    pub seed: Option<u64>,

    // Output.
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub raw: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>, expected_task: &str, problems: &mut Vec<String>) -> Self {
        let Some(path) = path else {
            return Self::default();
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                problems.push(format!("cannot read config {}: {e}", path.display()));
                return Self::default();
            }
        };
        let cfg: FileConfig = match serde_json::from_str(&text) {
            Ok(c) => c,
            Err(e) => {
                problems.push(format!("cannot parse config {}: {e}", path.display()));
                return Self::default();
            }
        };
        if let Some(task) = &cfg.task {
            if task != expected_task {
                problems.push(format!(
                    "config task \"{task}\" does not match subcommand \"{expected_task}\""
                ));
            }
        }
        if let Some(v) = cfg.schema_version {
            if v != fuzzplan::report::SCHEMA_VERSION {
                problems.push(format!(
                    "unsupported config schema_version {v} (expected {})",
                    fuzzplan::report::SCHEMA_VERSION
                ));
            }
        }
        cfg
    }
}

/// Parse `a,b,c` lists of reals.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {t:?}: {e}"))
        })
        .collect()
}

/// Parse a fuzzy fraction from `p1,p2,p3` (triangular), five points
/// (pentagonal), a single point (crisp) or an inline JSON object.
pub fn parse_fuzzy(s: &str) -> Result<FuzzyFraction, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let pts = parse_real_list(s)?;
    match pts.as_slice() {
        [x] => FuzzyFraction::crisp(*x).map_err(|e| e.to_string()),
        [a, b, c] => TriangularFuzzy::new(*a, *b, *c)
            .map(Into::into)
            .map_err(|e| e.to_string()),
        [a, b, c, d, e] => PentagonalFuzzy::new(*a, *b, *c, *d, *e)
            .map(Into::into)
            .map_err(|e| e.to_string()),
        other => Err(format!(
            "expected 1, 3 or 5 points, got {} in {s:?}",
            other.len()
        )),
    }
}

/// Parse a plan tuple `n,m,k,c1,c2`.
pub fn parse_plan(s: &str) -> Result<PlanParams, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| format!("bad integer {t:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [n, m, k, c1, c2] => PlanParams::new(*n, *m, *k, *c1, *c2).map_err(|e| e.to_string()),
        other => Err(format!(
            "expected n,m,k,c1,c2 (5 integers), got {}",
            other.len()
        )),
    }
}

/// Parse inspection error rates `delta1,delta2`.
pub fn parse_errors(s: &str) -> Result<InspectionErrors, String> {
    let parts = parse_real_list(s)?;
    match parts.as_slice() {
        [d1, d2] => InspectionErrors::new(*d1, *d2).map_err(|e| e.to_string()),
        other => Err(format!(
            "expected delta1,delta2, got {} values",
            other.len()
        )),
    }
}
