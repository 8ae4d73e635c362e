//! The `verify`, `sharpness` and `distance` commands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisenberg_hardy::domains::{weight_identity_check, Domain, HalfSpace, Polytope, WeightAggregation, WeightSpec};
use heisenberg_hardy::fields::make_bump;
use heisenberg_hardy::hardy::{
    default_quadrature, evaluate_quotient, polytope_interface_audit_total, AuditReport, HardyError, QuotientReport,
};
use heisenberg_hardy::metrics::{cc_distance, kaplan_distance, CCResult};
use heisenberg_hardy::quadrature::{QuadratureSpec, Rule};
use heisenberg_hardy::sharpness::{probe_conjecture, run_l2_sharpness, run_lp_sharpness, ConvergenceRecord};
use heisenberg_hardy::Point;
use serde::Serialize;

use crate::config::{load_config, RunConfig};
use crate::polytope_file::load_polytope;
use crate::report::{convergence_csv, path_csv, write_file, Envelope};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "HHARDY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hhardy", version, about = "Hardy inequalities on the Heisenberg group")]
pub struct Cli {
    /// TOML file with `[solver]` and `[sharpness]` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate both sides of a Hardy inequality for one test function.
    Verify(VerifyArgs),
    /// Run a sharpness schedule or the conjecture probe.
    Sharpness(SharpnessArgs),
    /// Kaplan and Carnot–Carathéodory distances, or the weight identity.
    Distance(DistanceArgs),
}

/// Comma-separated coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Coords(pub Vec<f64>);

impl FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Result<Vec<f64>, _> = s.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match v {
            Ok(v) if v.iter().all(|x| x.is_finite()) => Ok(Coords(v)),
            Ok(_) => Err("coordinates must be finite".into()),
            Err(e) => Err(format!("expected comma-separated numbers ({e})")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    PerComponent,
    L2,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// `halfspace`, `cube`, `simplex`, `slab`, or a polytope file.
    #[arg(long, default_value = "halfspace")]
    pub domain: String,
    /// Normal of the half-space or slab.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<Coords>,
    /// Offset of the half-space, lower offset of the slab.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    /// Upper offset of the slab (default `d + 1`).
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// The `n` of ℍⁿ for builtin polytopes.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Aggregation::PerComponent)]
    pub aggregation: Aggregation,
    /// `bump:default` or `bump:<center>:<radii>`.
    #[arg(long, default_value = "bump:default")]
    pub u: String,
    /// `gauss:<order>` or `mc:<samples>`.
    #[arg(long)]
    pub quad: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Interface points sampled by the polytope audit.
    #[arg(long, default_value_t = 10_000)]
    pub audit_samples: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `L²` family when `p = 2`, `Lᵖ` otherwise.
    Auto,
    L2,
    Lp,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SharpnessArgs {
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// `default` or `config` (schedules from the config file).
    #[arg(long, default_value = "default")]
    pub schedule: String,
    #[arg(long, value_enum, default_value_t = Family::Auto)]
    pub family: Family,
    /// Probe the ℓ²-aggregated weight instead of running a schedule.
    #[arg(long)]
    pub conjecture: bool,
    /// Probe evaluations (default from config).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Convergence CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<Coords>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<Coords>,
    /// Check `(⟨X,ν⟩² + ⟨Y,ν⟩²)/4 = ν_t² δ_cc²(ξ, Ξ_ν)` instead.
    #[arg(long)]
    pub identity_check: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<Coords>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<Coords>,
    /// Overrides the solver seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit 1 when the solver does not converge.
    #[arg(long)]
    pub strict: bool,
    /// CSV dump of the optimized path.
    #[arg(long)]
    pub path_csv: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid input; exit code 2.
    Config(String),
    /// Failure while computing or writing; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn config_err(field: &str, e: impl fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(config_err("--threads", "must be at least 1"));
        }
        // Fails only when a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let cfg = match &cli.config {
        Some(path) => load_config(path).map_err(|e| config_err("--config", e))?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Sharpness(a) => cmd_sharpness(a, &cfg),
        Command::Distance(a) => cmd_distance(a, &cfg),
    }
}

fn write_json<C: Serialize, R: Serialize>(
    path: Option<&Path>,
    command: &str,
    seed: u64,
    config: &C,
    result: &R,
) -> Result<(), CliError> {
    if let Some(path) = path {
        let json = Envelope::new(command, seed, config, result).to_json().map_err(runtime)?;
        write_file(path, &json).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn build_domain(a: &VerifyArgs, warnings: &mut Vec<String>) -> Result<Domain, CliError> {
    let default_normal = |n: usize| {
        let mut v = vec![0.0; 2 * n + 1];
        v[2 * n] = 1.0;
        v
    };
    let normal = |n: usize| -> Result<Vec<f64>, CliError> {
        let v = a.nu.as_ref().map(|c| c.0.clone()).unwrap_or_else(|| default_normal(n));
        if v.len() < 3 || v.len() % 2 == 0 {
            return Err(config_err("--nu", format!("expected 2n+1 components, got {}", v.len())));
        }
        Ok(v)
    };
    let mut normalize = |v: Vec<f64>, d: f64| -> Result<HalfSpace, CliError> {
        let (h, len) = HalfSpace::normalized(v, d).map_err(|e| config_err("--nu", e))?;
        if (len - 1.0).abs() > 1e-9 {
            let msg = format!("--nu had length {len}; rescaled to unit length");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(h)
    };
    if a.n == 0 {
        return Err(config_err("--n", "must be at least 1"));
    }
    Ok(match a.domain.as_str() {
        "halfspace" => normalize(normal(a.n)?, a.d)?.into(),
        "cube" => Polytope::unit_cube(a.n).into(),
        "simplex" => Polytope::simplex(a.n).into(),
        "slab" => {
            let hi = a.hi.unwrap_or(a.d + 1.0);
            let h = normalize(normal(a.n)?, a.d)?;
            let len = a.nu.as_ref().map_or(1.0, |c| c.0.iter().map(|v| v * v).sum::<f64>().sqrt());
            Polytope::slab(h.normal().to_vec(), a.d / len, hi / len)
                .map_err(|e| config_err("--hi", e))?
                .into()
        }
        path => {
            let loaded = load_polytope(Path::new(path)).map_err(|e| config_err("--domain", e))?;
            warnings.extend(loaded.warnings);
            loaded.polytope.into()
        }
    })
}

/// A bump whose support box keeps a gap of 5% of the center's boundary
/// distance, or the bump given on the command line.
fn build_bump(spec: &str, domain: &Domain) -> Result<heisenberg_hardy::fields::Bump, CliError> {
    let dim = domain.ambient_dim();
    let rest = spec
        .strip_prefix("bump:")
        .ok_or_else(|| config_err("--u", "expected `bump:default` or `bump:<center>:<radii>`"))?;
    if rest == "default" {
        let center: Vec<f64> = match domain {
            Domain::HalfSpace(h) => h.normal().iter().map(|v| v * (h.offset() + 1.0)).collect(),
            Domain::Polytope(p) => {
                if !p.is_bounded() {
                    return Err(config_err("--u", "bump:default needs a bounded polytope or a half-space"));
                }
                p.interior_point().to_vec()
            }
        };
        let facets = domain.facets();
        let dist = facets
            .iter()
            .map(|f| f.signed_distance(&center))
            .fold(f64::INFINITY, f64::min);
        let reach = facets
            .iter()
            .map(|f| f.normal().iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let r = 0.95 * dist / reach;
        return Ok(make_bump(&center, &vec![r; dim], 1.0));
    }
    let mut parts = rest.split(':');
    let (Some(c), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(config_err("--u", "expected `bump:<center>:<radii>`"));
    };
    let center = Coords::from_str(c).map_err(|e| config_err("--u center", e))?.0;
    let radii = Coords::from_str(r).map_err(|e| config_err("--u radii", e))?.0;
    if center.len() != dim || radii.len() != dim {
        return Err(config_err("--u", format!("center and radii need {dim} components")));
    }
    if radii.iter().any(|r| *r <= 0.0) {
        return Err(config_err("--u radii", "must be positive"));
    }
    Ok(make_bump(&center, &radii, 1.0))
}

fn parse_quad(spec: Option<&str>, n: usize, seed: u64) -> Result<QuadratureSpec, CliError> {
    let Some(s) = spec else {
        return Ok(default_quadrature(n, seed));
    };
    let (kind, val) = s
        .split_once(':')
        .ok_or_else(|| config_err("--quad", "expected `gauss:<order>` or `mc:<samples>`"))?;
    let val: usize = val.parse().map_err(|e| config_err("--quad", e))?;
    let rule = match kind {
        "gauss" => Rule::Gauss { order: val },
        "mc" => Rule::MonteCarlo { samples: val },
        other => return Err(config_err("--quad", format!("unknown rule `{other}`"))),
    };
    let q = QuadratureSpec { rule, seed };
    q.validate(2 * n + 1).map_err(|e| config_err("--quad", e))?;
    Ok(q)
}

#[derive(Debug, Serialize)]
struct VerifyResult {
    holds: bool,
    report: QuotientReport,
    audit: Option<AuditReport>,
    warnings: Vec<String>,
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let domain = build_domain(a, &mut warnings)?;
    let n = domain.dim();
    let aggregation = match a.aggregation {
        Aggregation::PerComponent => WeightAggregation::PerComponent,
        Aggregation::L2 => WeightAggregation::L2Conjecture,
    };
    let spec = WeightSpec::new(a.p, aggregation).map_err(|e| config_err("--p", e))?;
    let u = build_bump(&a.u, &domain)?;
    let quad = parse_quad(a.quad.as_deref(), n, a.seed)?;
    let report = evaluate_quotient(&u, &domain, &spec, &quad).map_err(|e| match e {
        HardyError::SupportMargin { .. } | HardyError::UnboundedSupport => config_err("--u", e),
        other => runtime(other),
    })?;
    let audit = match &domain {
        Domain::Polytope(p) if p.is_bounded() && a.audit_samples > 0 => {
            Some(polytope_interface_audit_total(p, a.p, a.audit_samples, a.seed).map_err(runtime)?)
        }
        _ => None,
    };
    let audit_ok = audit.as_ref().map_or(true, |r| r.negative_samples == 0);
    let holds = report.holds() && audit_ok;
    println!(
        "verify {} p={} {}: quotient={:.6} constant={:.6} margin={:.3e} sigma={:.3e}{} {}",
        report.domain,
        report.p,
        aggregation.label(),
        report.quotient,
        report.constant,
        report.margin,
        report.quotient_error,
        audit
            .as_ref()
            .map(|r| format!(" audit={}/{} negative", r.negative_samples, r.total_samples))
            .unwrap_or_default(),
        if holds { "PASS" } else { "FAIL" }
    );
    let result = VerifyResult { holds, report, audit, warnings };
    write_json(a.out.as_deref(), "verify", a.seed, a, &result)?;
    Ok(if holds { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct SharpnessConfigView<'a> {
    args: &'a SharpnessArgs,
    sharpness: &'a crate::config::SharpnessSection,
}

pub fn cmd_sharpness(a: &SharpnessArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let section = match a.schedule.as_str() {
        "default" => crate::config::SharpnessSection::default(),
        "config" => cfg.sharpness.clone(),
        other => return Err(config_err("--schedule", format!("expected `default` or `config`, got `{other}`"))),
    };
    if !(a.p >= 2.0 && a.p.is_finite()) {
        return Err(config_err("--p", "must be at least 2"));
    }
    let view = SharpnessConfigView {
        args: a,
        sharpness: &section,
    };
    if a.conjecture {
        let budget = a.budget.unwrap_or(section.probe_budget);
        if budget < 11 {
            return Err(config_err("--budget", "must be at least 11"));
        }
        let r = probe_conjecture(a.p, budget, a.seed).map_err(runtime)?;
        println!(
            "conjecture probe p={} ({}): best quotient={:.6} sigma={:.3e} floor={:.6} constant={:.6} evaluations={}",
            r.p,
            r.label,
            r.best_quotient,
            r.best_error,
            r.floor,
            heisenberg_hardy::hardy::sharp_constant(r.p).map_err(runtime)?,
            r.evaluations
        );
        write_json(a.out.as_deref(), "sharpness-conjecture", a.seed, &view, &r)?;
        return Ok(if r.above_floor() { Outcome::Pass } else { Outcome::Fail });
    }
    let opts = section.options();
    let l2 = match a.family {
        Family::Auto => a.p == 2.0,
        Family::L2 => {
            if a.p != 2.0 {
                return Err(config_err("--family", "the L2 family needs --p 2"));
            }
            true
        }
        Family::Lp => false,
    };
    let (record, envelope): (ConvergenceRecord, f64) = if l2 {
        (run_l2_sharpness(&section.l2(), &opts).map_err(runtime)?, 1.05)
    } else {
        (run_lp_sharpness(a.p, &section.lp(a.p), &opts).map_err(runtime)?, 1.10)
    };
    for w in &record.warnings {
        log::warn!("schedule: {w}");
    }
    for (k, (q, s)) in record.quotients.iter().zip(&record.quotient_errors).enumerate() {
        println!("step {k}: quotient={q:.6} sigma={s:.2e}");
    }
    let within = record.final_quotient() <= record.target * envelope;
    let monotone = !l2 || record.strictly_decreasing();
    let ok = within && monotone && record.respects_floor();
    println!(
        "sharpness p={}: final quotient={:.6} target={:.6} bound={:.6} {}",
        record.p,
        record.final_quotient(),
        record.target,
        record.target * envelope,
        if ok { "PASS" } else { "FAIL" }
    );
    write_json(a.out.as_deref(), "sharpness", a.seed, &view, &record)?;
    if let Some(path) = &a.csv {
        let csv = convergence_csv(&record, a.seed, &view).map_err(runtime)?;
        write_file(path, &csv).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct DistanceConfigView<'a> {
    args: &'a DistanceArgs,
    solver: &'a heisenberg_hardy::metrics::SolverConfig,
}

#[derive(Serialize)]
struct DistanceResult {
    kaplan: f64,
    ratio: f64,
    cc: CCResult,
}

fn point(field: &str, c: &Option<Coords>) -> Result<Point, CliError> {
    let c = c.as_ref().ok_or_else(|| config_err(field, "required"))?;
    Point::from_coords(c.0.clone()).map_err(|e| config_err(field, e))
}

pub fn cmd_distance(a: &DistanceArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut solver = cfg.solver.clone();
    if let Some(s) = a.seed {
        solver.seed = s;
    }
    let view = DistanceConfigView {
        args: a,
        solver: &solver,
    };
    if a.identity_check {
        let xi = point("--xi", &a.xi)?;
        let nu = a.nu.as_ref().ok_or_else(|| config_err("--nu", "required"))?;
        let (h, len) = HalfSpace::normalized(nu.0.clone(), a.d).map_err(|e| config_err("--nu", e))?;
        if (len - 1.0).abs() > 1e-9 {
            log::warn!("--nu had length {len}; rescaled to unit length");
        }
        let r = weight_identity_check(&h, &xi, &solver).map_err(|e| config_err("--nu/--xi", e))?;
        println!(
            "weight identity: lhs={:.6} rhs={:.6} residual={:.3e} converged={}",
            r.lhs, r.rhs, r.residual, r.solver_converged
        );
        write_json(a.out.as_deref(), "distance-identity", solver.seed, &view, &r)?;
        return Ok(if a.strict && !r.solver_converged {
            Outcome::Fail
        } else {
            Outcome::Pass
        });
    }
    let p = point("--from", &a.from)?;
    let q = point("--to", &a.to)?;
    if p.dim() != q.dim() {
        return Err(config_err("--to", "points must have the same dimension"));
    }
    let kaplan = kaplan_distance(&p, &q).map_err(runtime)?;
    let cc = cc_distance(&p, &q, &solver).map_err(runtime)?;
    let ratio = if kaplan > 0.0 { cc.distance / kaplan } else { f64::NAN };
    println!(
        "kaplan={:.6} cc={:.6} converged={} ratio={}",
        kaplan,
        cc.distance,
        cc.converged,
        if ratio.is_finite() { format!("{ratio:.6}") } else { "undefined".into() }
    );
    if let Some(path) = &a.path_csv {
        let csv = path_csv(&cc.path, solver.seed, &view).map_err(runtime)?;
        write_file(path, &csv).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    }
    let converged = cc.converged;
    let result = DistanceResult { kaplan, ratio, cc };
    write_json(a.out.as_deref(), "distance", solver.seed, &view, &result)?;
    Ok(if a.strict && !converged { Outcome::Fail } else { Outcome::Pass })
}
