//! Command-line surface: evaluate bands, design plans, sweep
//! operating-characteristic tables, compare plan families, analyze
//! inspection errors, simulate lot streams, and regenerate the reference
//! tables.

mod commands;
mod config;
mod reproduce;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use fuzzplan::design::{Risk, SearchLimits};
use fuzzplan::kernels::DistModel;

use config::{
    parse_errors, parse_fuzzy, parse_plan, parse_real_list, Family, FileConfig, OutputFormat,
};

#[derive(Parser)]
#[command(
    name = "fuzzplan",
    version,
    about = "Design and evaluate fuzzy multiple deferred state acceptance sampling plans"
)]
struct Cli {
    /// Worker threads (defaults to FUZZPLAN_JOBS, then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct IoArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Full-precision numbers instead of fixed four decimals.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Default)]
struct PlanArgs {
    /// Fuzzy fraction: "p1,p2,p3", five points, one point, or JSON.
    #[arg(long)]
    fuzzy: Option<String>,

    /// Plan tuple "n,m,k,c1,c2".
    #[arg(long)]
    plan: Option<String>,

    /// Defect-count model.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,

    /// Inspection error rates "delta1,delta2".
    #[arg(long)]
    errors: Option<String>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Binomial,
    Poisson,
}

impl From<ModelArg> for DistModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Binomial => DistModel::Binomial,
            ModelArg::Poisson => DistModel::Poisson,
        }
    }
}

#[derive(Args, Default)]
struct RequirementArgs {
    /// Acceptable quality level: points or JSON fuzzy number.
    #[arg(long)]
    aql: Option<String>,

    /// Limiting quality level: points or JSON fuzzy number.
    #[arg(long)]
    lql: Option<String>,

    /// Producer risk: crisp number or fuzzy points/JSON.
    #[arg(long)]
    alpha: Option<String>,

    /// Consumer risk: crisp number or fuzzy points/JSON.
    #[arg(long)]
    beta: Option<String>,

    /// Design cut level.
    #[arg(long)]
    nu: Option<f64>,

    #[arg(long)]
    n_max: Option<u32>,

    #[arg(long)]
    m_max: Option<u32>,

    #[arg(long)]
    c2_max: Option<u32>,

    /// Cap on the required deferral count k (1 reproduces the published
    /// tables; larger values search the full generalized family).
    #[arg(long)]
    k_max: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Acceptance and total-inspection bands for one configuration.
    Evaluate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        /// Cut levels "a,b,c".
        #[arg(long)]
        nu_levels: Option<String>,
        /// Lot size for total-inspection bands.
        #[arg(long)]
        lot_size: Option<u32>,
    },
    /// Find the smallest plan meeting a two-point requirement.
    Design {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        req: RequirementArgs,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Plan family to design.
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
    /// Sweep the facilitator shift into an operating-characteristic band table.
    Band {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        /// Cut levels "a,b,c".
        #[arg(long)]
        nu_levels: Option<String>,
        /// Facilitator shifts "a,b,c".
        #[arg(long)]
        theta_grid: Option<String>,
    },
    /// ASN of all four plan families for one requirement.
    Compare {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        req: RequirementArgs,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Side-by-side bands with and without inspection errors.
    Perturb {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        /// Cut level of the sweep.
        #[arg(long)]
        nu: Option<f64>,
        /// Facilitator shifts "a,b,c".
        #[arg(long)]
        theta_grid: Option<String>,
    },
    /// Monte Carlo lot-stream estimate of the acceptance rate.
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        /// True defect fraction.
        #[arg(long)]
        p: Option<f64>,
        /// Stream length (warmup included).
        #[arg(long)]
        lots: Option<u64>,
        /// Discarded leading lots per stream.
        #[arg(long)]
        warmup: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write a per-lot trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Cap on trace rows.
        #[arg(long, default_value_t = 10_000)]
        trace_rows: u64,
    },
    /// Regenerate all reference tables and verify them against the
    /// checked-in expected values.
    Reproduce {
        /// Directory for the regenerated tables.
        #[arg(long, default_value = "reproduce-out")]
        out_dir: PathBuf,
        /// Read expected tables from here instead of the built-in copies.
        #[arg(long)]
        expected_dir: Option<PathBuf>,
        /// Lot-stream length per simulator case.
        #[arg(long, default_value_t = 1_000_000)]
        lots: u64,
        #[arg(long, default_value_t = 20_240_808)]
        seed: u64,
    },
}

fn parse_risk(s: &str) -> Result<Risk, String> {
    if let Ok(x) = s.trim().parse::<f64>() {
        return Ok(Risk::Crisp(x));
    }
    parse_fuzzy(s).map(Risk::Fuzzy)
}

fn init_rayon(jobs: Option<usize>) {
    let jobs = jobs.or_else(|| {
        std::env::var("FUZZPLAN_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Apply a textual flag override on top of a config-file field, collecting
/// parse failures instead of aborting on the first.
fn override_with<T>(
    slot: &mut Option<T>,
    flag: &Option<String>,
    parse: impl Fn(&str) -> Result<T, String>,
    what: &str,
    problems: &mut Vec<String>,
) {
    if let Some(raw) = flag {
        match parse(raw) {
            Ok(v) => *slot = Some(v),
            Err(e) => problems.push(format!("invalid {what}: {e}")),
        }
    }
}

fn merge_limits(file: Option<SearchLimits>, req: &RequirementArgs) -> SearchLimits {
    let mut limits = file.unwrap_or_default();
    if let Some(n) = req.n_max {
        limits.n_max = n;
    }
    if let Some(m) = req.m_max {
        limits.m_max = m;
    }
    if let Some(c) = req.c2_max {
        limits.c2_max = c;
    }
    if let Some(k) = req.k_max {
        limits.k_max = k;
    }
    limits
}

type RequirementInputs = (
    Option<fuzzplan::FuzzyFraction>,
    Option<fuzzplan::FuzzyFraction>,
    Option<Risk>,
    Option<Risk>,
    f64,
    SearchLimits,
);

fn requirement_inputs(
    file: &mut FileConfig,
    req: &RequirementArgs,
    problems: &mut Vec<String>,
) -> RequirementInputs {
    override_with(&mut file.aql, &req.aql, parse_fuzzy, "aql", problems);
    override_with(&mut file.lql, &req.lql, parse_fuzzy, "lql", problems);
    override_with(&mut file.alpha, &req.alpha, parse_risk, "alpha", problems);
    override_with(&mut file.beta, &req.beta, parse_risk, "beta", problems);
    let nu = req.nu.or(file.nu).unwrap_or(1.0);
    let limits = merge_limits(file.limits, req);
    (file.aql, file.lql, file.alpha, file.beta, nu, limits)
}

fn plan_inputs(file: &mut FileConfig, plan: &PlanArgs, problems: &mut Vec<String>) {
    override_with(&mut file.fuzzy, &plan.fuzzy, parse_fuzzy, "fuzzy", problems);
    override_with(&mut file.plan, &plan.plan, parse_plan, "plan", problems);
    if let Some(m) = plan.model {
        file.model = Some(m.into());
    }
    override_with(
        &mut file.errors,
        &plan.errors,
        parse_errors,
        "errors",
        problems,
    );
}

fn io_inputs(
    file: &FileConfig,
    io: &IoArgs,
    default_format: OutputFormat,
) -> (Option<PathBuf>, OutputFormat, bool) {
    let output = io.out.clone().or_else(|| file.output.clone());
    let format = io.format.or(file.format).unwrap_or(default_format);
    let raw = io.raw || file.raw.unwrap_or(false);
    (output, format, raw)
}

fn main() {
    let cli = Cli::parse();
    init_rayon(cli.jobs);
    let code = dispatch(cli.command);
    std::process::exit(code);
}

fn dispatch(command: Command) -> i32 {
    match command {
        Command::Evaluate {
            io,
            plan,
            nu_levels,
            lot_size,
        } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "evaluate", &mut problems);
            plan_inputs(&mut file, &plan, &mut problems);
            override_with(
                &mut file.nu_levels,
                &nu_levels,
                parse_real_list,
                "nu_levels",
                &mut problems,
            );
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Json);
            commands::evaluate(
                commands::EvaluateInputs {
                    fuzzy: file.fuzzy,
                    plan: file.plan,
                    model: file.model,
                    nu_levels: file.nu_levels.clone(),
                    lot_size: lot_size.or(file.lot_size),
                    errors: file.errors,
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Design {
            io,
            req,
            model,
            family,
        } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "design", &mut problems);
            let (aql, lql, alpha, beta, nu, limits) =
                requirement_inputs(&mut file, &req, &mut problems);
            if let Some(m) = model {
                file.model = Some(m.into());
            }
            let family = family.or(file.family).unwrap_or(Family::Gmds);
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Json);
            commands::design(
                commands::DesignInputs {
                    aql,
                    lql,
                    alpha,
                    beta,
                    nu,
                    model: file.model,
                    limits,
                    family,
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Band {
            io,
            plan,
            nu_levels,
            theta_grid,
        } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "band", &mut problems);
            plan_inputs(&mut file, &plan, &mut problems);
            override_with(
                &mut file.nu_levels,
                &nu_levels,
                parse_real_list,
                "nu_levels",
                &mut problems,
            );
            override_with(
                &mut file.theta_grid,
                &theta_grid,
                parse_real_list,
                "theta_grid",
                &mut problems,
            );
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Csv);
            commands::band(
                commands::BandInputs {
                    fuzzy: file.fuzzy,
                    plan: file.plan,
                    model: file.model,
                    nu_levels: file.nu_levels.clone(),
                    theta_grid: file.theta_grid.clone(),
                    errors: file.errors,
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Compare { io, req, model } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "compare", &mut problems);
            let (aql, lql, alpha, beta, nu, limits) =
                requirement_inputs(&mut file, &req, &mut problems);
            if let Some(m) = model {
                file.model = Some(m.into());
            }
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Csv);
            commands::compare(
                commands::CompareInputs {
                    aql,
                    lql,
                    alpha,
                    beta,
                    nu,
                    model: file.model,
                    limits,
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Perturb {
            io,
            plan,
            nu,
            theta_grid,
        } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "perturb", &mut problems);
            plan_inputs(&mut file, &plan, &mut problems);
            override_with(
                &mut file.theta_grid,
                &theta_grid,
                parse_real_list,
                "theta_grid",
                &mut problems,
            );
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Csv);
            commands::perturb(
                commands::PerturbInputs {
                    fuzzy: file.fuzzy,
                    plan: file.plan,
                    model: file.model,
                    errors: file.errors,
                    nu: nu.or(file.nu).unwrap_or(0.0),
                    theta_grid: file.theta_grid.clone(),
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Simulate {
            io,
            plan,
            p,
            lots,
            warmup,
            seed,
            trace,
            trace_rows,
        } => {
            let mut problems = Vec::new();
            let mut file = FileConfig::load(io.config.as_deref(), "simulate", &mut problems);
            plan_inputs(&mut file, &plan, &mut problems);
            let (output, format, raw) = io_inputs(&file, &io, OutputFormat::Json);
            commands::simulate(
                commands::SimulateInputs {
                    p: p.or(file.p),
                    plan: file.plan,
                    model: file.model,
                    lots: lots.or(file.lots),
                    warmup: warmup.or(file.warmup),
                    seed: seed.or(file.seed),
                    errors: file.errors,
                    trace,
                    trace_rows,
                    output,
                    format,
                    raw,
                },
                problems,
            )
        }
        Command::Reproduce {
            out_dir,
            expected_dir,
            lots,
            seed,
        } => reproduce::run(&reproduce::Options {
            out_dir,
            expected_dir,
            lots,
            seed,
        }),
    }
}
