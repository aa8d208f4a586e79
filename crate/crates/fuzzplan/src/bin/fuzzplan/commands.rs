//! Subcommand implementations: gather inputs (config file plus flag
//! overrides), validate everything up front, compute, and emit one
//! deterministic report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fuzzplan::bands::{default_nu_levels, default_theta_grid, foc_band};
use fuzzplan::design::{
    compare_asn, design_dsp, design_gmds, design_mds, design_ssp, ComparisonRow, DesignResult,
    DesignedPlan, OCRequirement, Risk, SearchLimits,
};
use fuzzplan::fuzzy::{FuzzyFraction, FuzzyNumber};
use fuzzplan::fuzzyprob::{
    apply_inspection_errors, ati_band, pa_band, pa_band_with_errors, InspectionErrors,
};
use fuzzplan::interval::Interval;
use fuzzplan::kernels::{DistModel, PlanParams};
use fuzzplan::report::{band_csv, fmt_real, SCHEMA_VERSION};
use fuzzplan::simulate::{simulate_gmds, simulate_gmds_trace, SimConfig, SimResult};

use crate::config::{Family, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

fn exit_code(e: &fuzzplan::Error) -> i32 {
    match e {
        fuzzplan::Error::Inconsistency(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn report_problems(problems: &[String]) -> i32 {
    for p in problems {
        eprintln!("error: {p}");
    }
    EXIT_USAGE
}

fn write_report(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn emit(path: Option<&Path>, body: &str) -> i32 {
    match write_report(path, body) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            EXIT_USAGE
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn require<T>(value: Option<T>, name: &str, problems: &mut Vec<String>) -> Option<T> {
    // A field that failed to parse was already reported; don't double up
    // with a missing-input message.
    let already_flagged = problems
        .iter()
        .any(|p| p.contains(&format!("invalid {name}")));
    if value.is_none() && !already_flagged {
        problems.push(format!("missing required input: {name}"));
    }
    value
}

// ---------------------------------------------------------------------------
// evaluate

pub struct EvaluateInputs {
    pub fuzzy: Option<FuzzyFraction>,
    pub plan: Option<PlanParams>,
    pub model: Option<DistModel>,
    pub nu_levels: Option<Vec<f64>>,
    pub lot_size: Option<u32>,
    pub errors: Option<InspectionErrors>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct EvaluateRow {
    nu: f64,
    pa: Interval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pa_with_errors: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ati: Option<Interval>,
}

#[derive(Serialize)]
struct EvaluateReport {
    schema_version: u32,
    task: &'static str,
    fuzzy: FuzzyFraction,
    plan: PlanParams,
    model: DistModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    lot_size: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<InspectionErrors>,
    rows: Vec<EvaluateRow>,
}

pub fn evaluate(inp: EvaluateInputs, mut problems: Vec<String>) -> i32 {
    let fuzzy = require(inp.fuzzy, "fuzzy", &mut problems);
    let plan = require(inp.plan, "plan", &mut problems);
    let model = require(inp.model, "model", &mut problems);
    let levels = inp.nu_levels.unwrap_or_else(default_nu_levels);
    for nu in &levels {
        if !(0.0..=1.0).contains(nu) {
            problems.push(format!("cut level {nu} outside [0, 1]"));
        }
    }
    if inp.errors.is_some() && fuzzy.is_some_and(|f| f.as_triangular().is_none()) {
        problems.push("inspection-error analysis requires a triangular fuzzy number".into());
    }
    if let (Some(lot), Some(plan)) = (inp.lot_size, &plan) {
        if lot < plan.n() {
            problems.push(format!(
                "lot size {lot} smaller than sample size {}",
                plan.n()
            ));
        }
    }
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let (fuzzy, plan, model) = (fuzzy.unwrap(), plan.unwrap(), model.unwrap());

    let mut rows = Vec::with_capacity(levels.len());
    for &nu in &levels {
        let pa = match pa_band(&fuzzy, nu, &plan, model) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
        };
        let pa_with_errors = match (&inp.errors, fuzzy.as_triangular()) {
            (Some(errs), Some(tri)) => match pa_band_with_errors(tri, errs, nu, &plan, model) {
                Ok(b) => Some(b),
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            },
            _ => None,
        };
        let ati = match inp.lot_size {
            Some(lot) => match ati_band(&fuzzy, nu, &plan, model, lot) {
                Ok(b) => Some(b),
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            },
            None => None,
        };
        rows.push(EvaluateRow {
            nu,
            pa,
            pa_with_errors,
            ati,
        });
    }

    let body = match inp.format {
        OutputFormat::Json => to_json(&EvaluateReport {
            schema_version: SCHEMA_VERSION,
            task: "evaluate",
            fuzzy,
            plan,
            model,
            lot_size: inp.lot_size,
            errors: inp.errors,
            rows,
        }),
        OutputFormat::Csv => {
            let mut head = String::from("nu,pa_lo,pa_hi");
            if inp.errors.is_some() {
                head.push_str(",pae_lo,pae_hi");
            }
            if inp.lot_size.is_some() {
                head.push_str(",ati_lo,ati_hi");
            }
            let mut out = head;
            out.push('\n');
            for r in &rows {
                let _ = write!(
                    out,
                    "{},{},{}",
                    fmt_real(r.nu, inp.raw),
                    fmt_real(r.pa.lo(), inp.raw),
                    fmt_real(r.pa.hi(), inp.raw)
                );
                if let Some(b) = &r.pa_with_errors {
                    let _ = write!(
                        out,
                        ",{},{}",
                        fmt_real(b.lo(), inp.raw),
                        fmt_real(b.hi(), inp.raw)
                    );
                }
                if let Some(b) = &r.ati {
                    let _ = write!(
                        out,
                        ",{},{}",
                        fmt_real(b.lo(), inp.raw),
                        fmt_real(b.hi(), inp.raw)
                    );
                }
                out.push('\n');
            }
            out
        }
    };
    emit(inp.output.as_deref(), &body)
}

// ---------------------------------------------------------------------------
// design

pub struct DesignInputs {
    pub aql: Option<FuzzyFraction>,
    pub lql: Option<FuzzyFraction>,
    pub alpha: Option<Risk>,
    pub beta: Option<Risk>,
    pub nu: f64,
    pub model: Option<DistModel>,
    pub limits: SearchLimits,
    pub family: Family,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct DesignReport {
    schema_version: u32,
    task: &'static str,
    model: DistModel,
    requirement: OCRequirement,
    limits: SearchLimits,
    result: DesignResult,
}

fn design_csv(result: &DesignResult, raw: bool) -> String {
    let mut out =
        String::from("family,feasible,n,m,k,c1,c2,n2,asn,asn_lower_problem,asn_upper_problem,binding_constraint\n");
    let (family, n, m, k, c1, c2, n2) = match &result.designed {
        Some(DesignedPlan::Gmds { plan }) => (
            "gmds",
            plan.n().to_string(),
            plan.m().to_string(),
            plan.k().to_string(),
            plan.c1().to_string(),
            plan.c2().to_string(),
            String::new(),
        ),
        Some(DesignedPlan::Mds { plan }) => (
            "mds",
            plan.n().to_string(),
            plan.m().to_string(),
            plan.k().to_string(),
            plan.c1().to_string(),
            plan.c2().to_string(),
            String::new(),
        ),
        Some(DesignedPlan::Ssp { plan }) => (
            "ssp",
            plan.n().to_string(),
            String::new(),
            String::new(),
            plan.c().to_string(),
            plan.c().to_string(),
            String::new(),
        ),
        Some(DesignedPlan::Dsp { plan }) => (
            "dsp",
            plan.n1().to_string(),
            String::new(),
            String::new(),
            plan.c1().to_string(),
            plan.c2().to_string(),
            plan.n2().to_string(),
        ),
        None => (
            "",
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ),
    };
    let _ = writeln!(
        out,
        "{family},{},{n},{m},{k},{c1},{c2},{n2},{},{},{},{}",
        result.feasible,
        result.asn.map_or(String::new(), |a| fmt_real(a, raw)),
        result
            .asn_lower_problem
            .map_or(String::new(), |n| n.to_string()),
        result
            .asn_upper_problem
            .map_or(String::new(), |n| n.to_string()),
        result.binding_constraint.clone().unwrap_or_default(),
    );
    out
}

pub fn design(inp: DesignInputs, mut problems: Vec<String>) -> i32 {
    let aql = require(inp.aql, "aql", &mut problems);
    let lql = require(inp.lql, "lql", &mut problems);
    let alpha = require(inp.alpha, "alpha", &mut problems);
    let beta = require(inp.beta, "beta", &mut problems);
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let req = match OCRequirement::new(
        aql.unwrap(),
        lql.unwrap(),
        alpha.unwrap(),
        beta.unwrap(),
        inp.nu,
    ) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let model = match require(inp.model, "model", &mut problems) {
        Some(m) => m,
        None => return report_problems(&problems),
    };

    let designer = match inp.family {
        Family::Gmds => design_gmds,
        Family::Mds => design_mds,
        Family::Ssp => design_ssp,
        Family::Dsp => design_dsp,
    };
    let result = match designer(&req, model, &inp.limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let feasible = result.feasible;

    let body = match inp.format {
        OutputFormat::Json => to_json(&DesignReport {
            schema_version: SCHEMA_VERSION,
            task: "design",
            model,
            requirement: req,
            limits: inp.limits,
            result,
        }),
        OutputFormat::Csv => design_csv(&result, inp.raw),
    };
    let code = emit(inp.output.as_deref(), &body);
    if code != EXIT_OK {
        return code;
    }
    if feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

// ---------------------------------------------------------------------------
// band

pub struct BandInputs {
    pub fuzzy: Option<FuzzyFraction>,
    pub plan: Option<PlanParams>,
    pub model: Option<DistModel>,
    pub nu_levels: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
    pub errors: Option<InspectionErrors>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct BandReport {
    schema_version: u32,
    task: &'static str,
    plan: PlanParams,
    model: DistModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    errors: Option<InspectionErrors>,
    points: Vec<fuzzplan::bands::FocBandPoint>,
}

pub fn band(inp: BandInputs, mut problems: Vec<String>) -> i32 {
    let fuzzy = require(inp.fuzzy, "fuzzy", &mut problems);
    let plan = require(inp.plan, "plan", &mut problems);
    let model = require(inp.model, "model", &mut problems);
    let base = match fuzzy {
        Some(f) => match f.as_triangular() {
            Some(t) => Some(*t),
            None => {
                problems.push("band sweeps require a triangular fuzzy number".into());
                None
            }
        },
        None => None,
    };
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let (base, plan, model) = (base.unwrap(), plan.unwrap(), model.unwrap());
    let levels = inp.nu_levels.unwrap_or_else(default_nu_levels);
    let thetas = inp.theta_grid.unwrap_or_else(default_theta_grid);

    let points = match foc_band(&base, &plan, model, &levels, &thetas, inp.errors.as_ref()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let body = match inp.format {
        OutputFormat::Csv => band_csv(&points, inp.raw),
        OutputFormat::Json => to_json(&BandReport {
            schema_version: SCHEMA_VERSION,
            task: "band",
            plan,
            model,
            errors: inp.errors,
            points,
        }),
    };
    emit(inp.output.as_deref(), &body)
}

// ---------------------------------------------------------------------------
// compare

pub struct CompareInputs {
    pub aql: Option<FuzzyFraction>,
    pub lql: Option<FuzzyFraction>,
    pub alpha: Option<Risk>,
    pub beta: Option<Risk>,
    pub nu: f64,
    pub model: Option<DistModel>,
    pub limits: SearchLimits,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct CompareReport {
    schema_version: u32,
    task: &'static str,
    row: ComparisonRow,
}

pub fn compare_row_csv(row: &ComparisonRow, raw: bool) -> String {
    let fmt = |a: Option<f64>| a.map_or(String::new(), |v| fmt_real(v, raw));
    format!(
        "{},{},{},{},{},{},{}\n",
        match row.model {
            DistModel::Binomial => "binomial",
            DistModel::Poisson => "poisson",
        },
        fmt_real(row.aql_modal, true),
        fmt_real(row.lql_modal, true),
        fmt(row.ssp.asn),
        fmt(row.dsp.asn),
        fmt(row.mds.asn),
        fmt(row.gmds.asn),
    )
}

pub const COMPARE_CSV_HEADER: &str = "model,aql,lql,ssp_asn,dsp_asn,mds_asn,gmds_asn\n";

pub fn compare(inp: CompareInputs, mut problems: Vec<String>) -> i32 {
    let aql = require(inp.aql, "aql", &mut problems);
    let lql = require(inp.lql, "lql", &mut problems);
    let alpha = require(inp.alpha, "alpha", &mut problems);
    let beta = require(inp.beta, "beta", &mut problems);
    let model = require(inp.model, "model", &mut problems);
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let req = match OCRequirement::new(
        aql.unwrap(),
        lql.unwrap(),
        alpha.unwrap(),
        beta.unwrap(),
        inp.nu,
    ) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let row = match compare_asn(&req, model.unwrap(), &inp.limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let all_feasible =
        row.ssp.feasible && row.dsp.feasible && row.mds.feasible && row.gmds.feasible;
    let body = match inp.format {
        OutputFormat::Csv => format!("{COMPARE_CSV_HEADER}{}", compare_row_csv(&row, inp.raw)),
        OutputFormat::Json => to_json(&CompareReport {
            schema_version: SCHEMA_VERSION,
            task: "compare",
            row,
        }),
    };
    let code = emit(inp.output.as_deref(), &body);
    if code != EXIT_OK {
        return code;
    }
    if all_feasible {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    }
}

// ---------------------------------------------------------------------------
// perturb

pub struct PerturbInputs {
    pub fuzzy: Option<FuzzyFraction>,
    pub plan: Option<PlanParams>,
    pub model: Option<DistModel>,
    pub errors: Option<InspectionErrors>,
    pub nu: f64,
    pub theta_grid: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct PerturbPoint {
    theta: f64,
    nu: f64,
    p_cut: Interval,
    pa_cut: Interval,
    p_cut_with_errors: Interval,
    pa_cut_with_errors: Interval,
}

#[derive(Serialize)]
struct PerturbReport {
    schema_version: u32,
    task: &'static str,
    plan: PlanParams,
    model: DistModel,
    errors: InspectionErrors,
    points: Vec<PerturbPoint>,
}

/// Side-by-side error-free and with-errors bands along the facilitator
/// sweep, both computed from the same plan and base number.
pub fn perturb(inp: PerturbInputs, mut problems: Vec<String>) -> i32 {
    let fuzzy = require(inp.fuzzy, "fuzzy", &mut problems);
    let plan = require(inp.plan, "plan", &mut problems);
    let model = require(inp.model, "model", &mut problems);
    let errors = require(inp.errors, "errors", &mut problems);
    let base = match fuzzy {
        Some(f) => match f.as_triangular() {
            Some(t) => Some(*t),
            None => {
                problems
                    .push("inspection-error analysis requires a triangular fuzzy number".into());
                None
            }
        },
        None => None,
    };
    if !(0.0..=1.0).contains(&inp.nu) {
        problems.push(format!("cut level {} outside [0, 1]", inp.nu));
    }
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let (base, plan, model, errors) = (
        base.unwrap(),
        plan.unwrap(),
        model.unwrap(),
        errors.unwrap(),
    );
    let thetas = inp.theta_grid.unwrap_or_else(default_theta_grid);

    let run = || -> fuzzplan::Result<Vec<PerturbPoint>> {
        let transformed = apply_inspection_errors(&base, &errors);
        let mut points = Vec::with_capacity(thetas.len());
        for &theta in &thetas {
            let plain = base.theta_shift(theta)?;
            let shifted_err = transformed.theta_shift(theta)?;
            points.push(PerturbPoint {
                theta,
                nu: inp.nu,
                p_cut: plain.alpha_cut(inp.nu)?,
                pa_cut: pa_band(&plain, inp.nu, &plan, model)?,
                p_cut_with_errors: shifted_err.alpha_cut(inp.nu)?,
                pa_cut_with_errors: pa_band(&shifted_err, inp.nu, &plan, model)?,
            });
        }
        Ok(points)
    };
    let points = match run() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };

    let body = match inp.format {
        OutputFormat::Csv => {
            let mut out =
                String::from("theta,nu,p_lo,p_hi,pa_lo,pa_hi,pe_lo,pe_hi,pae_lo,pae_hi\n");
            for p in &points {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt_real(p.theta, inp.raw),
                    fmt_real(p.nu, inp.raw),
                    fmt_real(p.p_cut.lo(), inp.raw),
                    fmt_real(p.p_cut.hi(), inp.raw),
                    fmt_real(p.pa_cut.lo(), inp.raw),
                    fmt_real(p.pa_cut.hi(), inp.raw),
                    fmt_real(p.p_cut_with_errors.lo(), inp.raw),
                    fmt_real(p.p_cut_with_errors.hi(), inp.raw),
                    fmt_real(p.pa_cut_with_errors.lo(), inp.raw),
                    fmt_real(p.pa_cut_with_errors.hi(), inp.raw),
                );
            }
            out
        }
        OutputFormat::Json => to_json(&PerturbReport {
            schema_version: SCHEMA_VERSION,
            task: "perturb",
            plan,
            model,
            errors,
            points,
        }),
    };
    emit(inp.output.as_deref(), &body)
}

// ---------------------------------------------------------------------------
// simulate

pub struct SimulateInputs {
    pub p: Option<f64>,
    pub plan: Option<PlanParams>,
    pub model: Option<DistModel>,
    pub lots: Option<u64>,
    pub warmup: Option<u64>,
    pub seed: Option<u64>,
    pub errors: Option<InspectionErrors>,
    pub trace: Option<PathBuf>,
    pub trace_rows: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw: bool,
}

#[derive(Serialize)]
struct SimulateReport {
    schema_version: u32,
    task: &'static str,
    config: SimConfig,
    result: SimResult,
}

pub fn simulate(inp: SimulateInputs, mut problems: Vec<String>) -> i32 {
    let p = require(inp.p, "p", &mut problems);
    let plan = require(inp.plan, "plan", &mut problems);
    let model = require(inp.model, "model", &mut problems);
    let lots = require(inp.lots, "lots", &mut problems);
    if !problems.is_empty() {
        return report_problems(&problems);
    }
    let plan = plan.unwrap();
    let cfg = SimConfig {
        p: p.unwrap(),
        plan,
        model: model.unwrap(),
        lots: lots.unwrap(),
        warmup: inp.warmup.unwrap_or_else(|| u64::from(plan.m()).max(100)),
        seed: inp.seed.unwrap_or(0),
        errors: inp.errors,
    };
    let result = match simulate_gmds(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(trace_path) = &inp.trace {
        let rows = match simulate_gmds_trace(&cfg, inp.trace_rows) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
        };
        let mut out = String::from("lot,defects,first_stage,accepted,warmup\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.lot, r.defects, r.first_stage, r.accepted, r.warmup
            );
        }
        if let Err(e) = std::fs::write(trace_path, out) {
            eprintln!("error: cannot write trace: {e}");
            return EXIT_USAGE;
        }
    }

    let body = match inp.format {
        OutputFormat::Json => to_json(&SimulateReport {
            schema_version: SCHEMA_VERSION,
            task: "simulate",
            config: cfg,
            result,
        }),
        OutputFormat::Csv => format!(
            "accept_rate,stderr,lots_counted\n{},{},{}\n",
            fmt_real(result.accept_rate, inp.raw),
            fmt_real(result.stderr, inp.raw),
            result.lots_counted
        ),
    };
    emit(inp.output.as_deref(), &body)
}
