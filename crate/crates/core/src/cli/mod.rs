//! Command-line frontend.
//!
//! Every run prints one JSON report on standard output and diagnostics on standard
//! error. Exit codes: 0 success, 1 a `verify` check or `attack` verdict failed,
//! 2 parse error, 3 domain or precondition error, 4 computational or unsupported.

mod corpus;
mod report;
mod spec;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use corpus::{oracle_agrees, verify_corpus, Check, INSTANCES, ORACLE_TOL};
pub use report::{EXIT_CHECKS_FAILED, EXIT_COMPUTATIONAL, EXIT_DOMAIN, EXIT_OK, EXIT_PARSE};
pub use spec::{load, FunctionSpec, PieceSpec};

use crate::error::{Error, Result};
use crate::oracle::{estimate_tau, McConfig};
use crate::perturb::{
    global_destabilizer, global_radius_bounds, is_global_member, is_local_member, local_radius,
    synthesize_destabilizer, Candidate, GlobalFamily, LinearPerturbation, LocalFamily,
    PolyhedralPerturbation,
};
use crate::polyfun::{PolyhedralFunction, Region};
use crate::settings::Settings;
use crate::slopes::{dee_family, full_report, TauProfile};
use report::{num, nums, rounded, status_of, Report};

#[derive(Debug, Parser)]
#[command(
    name = "ebound",
    version,
    about = "Error-bound moduli, slopes and perturbation radii of max-of-affine functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Args)]
pub struct Tolerances {
    /// Active-set detection tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_active: f64,
    /// Feasibility / strictness tolerance for linear systems.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_feas: f64,
    /// Geometric tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_geo: f64,
}

impl Tolerances {
    fn settings(&self) -> Result<Settings> {
        for (name, v) in [
            ("tol-active", self.tol_active),
            ("tol-feas", self.tol_feas),
            ("tol-geo", self.tol_geo),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "--{name} must be finite and >= 0"
                )));
            }
        }
        Ok(Settings {
            tol_active: self.tol_active,
            tol_feas: self.tol_feas,
            tol_geo: self.tol_geo,
            ..Settings::default()
        })
    }
}

/// A point or vector given as `1.5` or `1,-2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let out: std::result::Result<Vec<f64>, _> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>())
        .collect();
    match out {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(Point(v)),
        _ => Err(format!(
            "expected comma-separated finite numbers, got {s:?}"
        )),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moduli and slopes, local ones too with --at.
    Analyze {
        spec: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<Point>,
    },
    /// Local radius at --at, or at every zero-level representative, and global bounds.
    Radius {
        spec: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<Point>,
    },
    /// Destabilizing linear perturbation of size below --eps.
    Attack {
        spec: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<Point>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Exact values against the Monte-Carlo oracles (and, with --corpus, known values).
    Verify {
        #[arg(required_unless_present = "corpus")]
        spec: Option<String>,
        #[arg(long)]
        corpus: bool,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<Point>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Localized slope tau(f, x, eps, delta).
    Tau {
        spec: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Point,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Also report the sampling estimate.
        #[arg(long)]
        estimate: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Family membership of a perturbed function f + p.
    Member {
        spec: String,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        candidate: CandidateArgs,
        /// Where a linear or polyhedral candidate is anchored (default: --at, else 0).
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        anchor: Option<Point>,
        /// Base point, required by local families.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<Point>,
    },
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            seed: self.seed,
            samples: self.samples,
            radius: self.radius,
            shrink_levels: self.levels,
            ..McConfig::default()
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CandidateArgs {
    /// p = c.
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<f64>,
    /// p(u) = <w, u - anchor>.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub slope: Option<Point>,
    /// p read from a spec file.
    #[arg(long)]
    pub perturbation: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Strong,
    Weak,
    #[value(alias = "strong_linear")]
    StrongLinear,
    #[value(alias = "weak_linear")]
    WeakLinear,
    Arbitrary,
    Convex,
    Linear,
}

impl Family {
    fn split(self) -> std::result::Result<GlobalFamily, LocalFamily> {
        match self {
            Family::Strong => Ok(GlobalFamily::Strong),
            Family::Weak => Ok(GlobalFamily::Weak),
            Family::StrongLinear => Ok(GlobalFamily::StrongLinear),
            Family::WeakLinear => Ok(GlobalFamily::WeakLinear),
            Family::Arbitrary => Err(LocalFamily::Arbitrary),
            Family::Convex => Err(LocalFamily::Convex),
            Family::Linear => Err(LocalFamily::Linear),
        }
    }
}

/// Parses `args` (program name first), runs, writes the report to `out` and
/// diagnostics to `err`, and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let name = command_name(&cli.command);
    let (value, code) = match cli
        .tolerances
        .settings()
        .and_then(|cfg| execute(&cli.command, &cfg))
    {
        Ok((v, code)) => (v, code),
        Err(e) => {
            let (status, code) = status_of(&e);
            let _ = writeln!(err, "ebound {name}: {e}");
            let mut r = Report::new(name);
            r.set("error", json!(e.to_string()));
            (r.finish(status), code)
        }
    };
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&value).expect("reports serialize")
    );
    code
}

/// Entry point for the binary: real arguments and streams, `EBOUND_THREADS` honoured.
pub fn run() -> i32 {
    if let Ok(t) = std::env::var("EBOUND_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("ignoring EBOUND_THREADS={t:?}: expected a positive integer"),
        }
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Radius { .. } => "radius",
        Command::Attack { .. } => "attack",
        Command::Verify { .. } => "verify",
        Command::Tau { .. } => "tau",
        Command::Member { .. } => "member",
    }
}

fn pt(p: &Option<Point>) -> Option<&[f64]> {
    p.as_ref().map(|p| p.0.as_slice())
}

fn input(path: &str) -> Result<(FunctionSpec, PolyhedralFunction)> {
    let s = load(path)?;
    let f = s.to_function()?;
    Ok((s, f))
}

fn execute(cmd: &Command, cfg: &Settings) -> Result<(Value, i32)> {
    let ok = |r: Report| (r.finish("ok"), EXIT_OK);
    match cmd {
        Command::Analyze { spec, at } => analyze(spec, pt(at), cfg).map(ok),
        Command::Radius { spec, at } => radius(spec, pt(at), cfg).map(ok),
        Command::Attack { spec, at, eps, xi } => attack(spec, pt(at), *eps, *xi, cfg),
        Command::Verify {
            spec,
            corpus,
            at,
            mc,
        } => verify(spec.as_deref(), *corpus, pt(at), &mc.config(), cfg),
        Command::Tau {
            spec,
            at,
            eps,
            delta,
            estimate,
            mc,
        } => tau_cmd(
            spec,
            &at.0,
            *eps,
            *delta,
            estimate.then(|| mc.config()),
            cfg,
        )
        .map(ok),
        Command::Member {
            spec,
            family,
            eps,
            candidate,
            anchor,
            at,
        } => member(spec, *family, *eps, candidate, pt(anchor), pt(at), cfg).map(ok),
    }
}

fn analyze(path: &str, at: Option<&[f64]>, cfg: &Settings) -> Result<Report> {
    let (s, f) = input(path)?;
    let mut r = Report::new("analyze");
    r.set("input", json!(s));
    r.set("slopes", rounded(&full_report(&f, at, cfg)?));
    if let Some(x) = at {
        let sub = f.subdifferential(x, cfg)?;
        r.set("active_set", json!(f.active_set(x, cfg.tol_active)?));
        r.set(
            "subdifferential_generators",
            json!(sub.generators.iter().map(|g| nums(g)).collect::<Vec<_>>()),
        );
        r.set("violating_side_sets", json!(dee_family(&f, x, cfg)?));
    }
    let zero: Vec<Value> = f
        .occurring_patterns(Region::ZeroLevel, cfg)?
        .into_iter()
        .map(|p| json!({ "active_set": p.set, "point": nums(&p.point) }))
        .collect();
    r.set("zero_level_patterns", json!(zero));
    Ok(r)
}

fn radius(path: &str, at: Option<&[f64]>, cfg: &Settings) -> Result<Report> {
    let (s, f) = input(path)?;
    let mut r = Report::new("radius");
    r.set("input", json!(s));
    let points = match at {
        Some(x) => vec![x.to_vec()],
        None => f
            .occurring_patterns(Region::ZeroLevel, cfg)?
            .into_iter()
            .map(|p| p.point)
            .collect(),
    };
    let mut local = Vec::new();
    for x in points {
        let rad = local_radius(&f, &x, cfg)?;
        local.push(json!({ "point": nums(&x), "radius": num(rad.value()) }));
    }
    r.set("local", json!(local));
    match global_radius_bounds(&f, cfg) {
        Ok((lo, hi)) => r.set(
            "global",
            json!({ "lower": num(lo.value()), "upper": num(hi.value()) }),
        ),
        Err(Error::Domain(msg)) => r.set("global", json!({ "unavailable": msg })),
        Err(e) => return Err(e),
    };
    Ok(r)
}

fn attack(
    path: &str,
    at: Option<&[f64]>,
    eps: f64,
    xi: Option<f64>,
    cfg: &Settings,
) -> Result<(Value, i32)> {
    let (s, f) = input(path)?;
    let d = match at {
        Some(x) => synthesize_destabilizer(&f, x, eps, xi, cfg)?,
        None => global_destabilizer(&f, eps, xi, cfg)?,
    };
    let holds = d.certificate.claim_holds(1e-9);
    let mut r = Report::new("attack");
    r.set("input", json!(s));
    r.set("eps", num(eps));
    r.set("perturbation", rounded(&d.perturbation));
    r.set(
        "slope_norm",
        num(crate::linalg::norm(&d.perturbation.slope)),
    );
    r.set("certificate", rounded(&d.certificate));
    r.set("verdict", json!(if holds { "PASS" } else { "FAIL" }));
    let name = s.name.as_ref().map(|n| format!("{n}_destabilized"));
    r.set("g", json!(FunctionSpec::from_function(&d.g, name)));
    let code = if holds { EXIT_OK } else { EXIT_CHECKS_FAILED };
    Ok((r.finish("ok"), code))
}

fn verify(
    path: Option<&str>,
    use_corpus: bool,
    at: Option<&[f64]>,
    mc: &McConfig,
    cfg: &Settings,
) -> Result<(Value, i32)> {
    let mut r = Report::new("verify");
    let mut checks = Vec::new();
    if use_corpus {
        checks.extend(verify_corpus(mc, cfg));
    }
    if let Some(p) = path {
        let (s, f) = input(p)?;
        let label = s.name.clone().unwrap_or_else(|| p.to_string());
        let mut c = corpus::Checks::new(&label);
        corpus::oracle_checks(&mut c, &f, at, mc, cfg)?;
        checks.extend(c.items);
        r.set("input", json!(s));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    r.set(
        "sampling",
        json!({ "seed": mc.seed, "samples": mc.samples, "radius": num(mc.radius), "levels": mc.shrink_levels }),
    );
    r.set("relative_tolerance", num(ORACLE_TOL));
    r.set("checks", json!(checks));
    r.set(
        "summary",
        json!({ "passed": checks.len() - failed, "failed": failed }),
    );
    let code = if failed == 0 {
        EXIT_OK
    } else {
        EXIT_CHECKS_FAILED
    };
    Ok((r.finish("ok"), code))
}

fn tau_cmd(
    path: &str,
    at: &[f64],
    eps: f64,
    delta: f64,
    mc: Option<McConfig>,
    cfg: &Settings,
) -> Result<Report> {
    let (s, f) = input(path)?;
    let prof = TauProfile::new(&f, at, cfg)?;
    let t = prof.eval(eps, delta)?;
    let mut r = Report::new("tau");
    r.set("input", json!(s));
    r.set("at", nums(at));
    r.set("eps", num(eps));
    r.set("delta", num(delta));
    r.set(
        "branch",
        json!(if prof.is_interior_branch() {
            "interior"
        } else {
            "region"
        }),
    );
    r.set("tau", num(t.value()));
    if let Some(mc) = mc {
        if prof.is_interior_branch() {
            r.set(
                "estimate",
                json!({ "unavailable": "the estimator covers the region branch only" }),
            );
        } else {
            let e = estimate_tau(&f, at, eps, delta, &mc, cfg)?;
            r.set(
                "estimate",
                json!({ "value": num(e.value), "accepted_samples": e.accepted() }),
            );
        }
    }
    Ok(r)
}

fn candidate(
    c: &CandidateArgs,
    dim: usize,
    anchor: Option<&[f64]>,
    at: Option<&[f64]>,
) -> Result<Candidate> {
    let anchor = || -> Vec<f64> {
        anchor
            .map(<[f64]>::to_vec)
            .or_else(|| at.map(<[f64]>::to_vec))
            .unwrap_or_else(|| vec![0.0; dim])
    };
    if let Some(v) = c.constant {
        if !v.is_finite() {
            return Err(Error::InvalidInput("--constant must be finite".into()));
        }
        return Ok(Candidate::Constant(v));
    }
    if let Some(w) = &c.slope {
        return Ok(Candidate::Linear(LinearPerturbation::new(
            anchor(),
            w.0.clone(),
        )));
    }
    let path = c
        .perturbation
        .as_deref()
        .expect("clap requires one candidate");
    let p = load(path)?.to_function()?;
    Ok(Candidate::Polyhedral(PolyhedralPerturbation {
        p,
        anchor: anchor(),
    }))
}

fn member(
    path: &str,
    family: Family,
    eps: f64,
    cand: &CandidateArgs,
    anchor: Option<&[f64]>,
    at: Option<&[f64]>,
    cfg: &Settings,
) -> Result<Report> {
    let (s, f) = input(path)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidInput("--eps must be finite and >= 0".into()));
    }
    let c = candidate(cand, f.dim(), anchor, at)?;
    let p = c.perturbing_function(f.dim())?;
    let mut r = Report::new("member");
    r.set("input", json!(s));
    r.set(
        "perturbing_function",
        json!(FunctionSpec::from_function(&p, None)),
    );
    r.set("eps", num(eps));
    match family.split() {
        Ok(g) => {
            let m = is_global_member(&f, &c, eps, g, cfg)?;
            r.set("family", json!(g));
            r.set("member", json!(m.member));
            r.set("witness", m.witness.as_ref().map_or(Value::Null, rounded));
            r.set("reason", json!(m.reason));
        }
        Err(l) => {
            let x = at.ok_or_else(|| {
                Error::InvalidInput("local families need a base point (--at)".into())
            })?;
            let m = is_local_member(&f, x, &c, eps, l, cfg)?;
            r.set("family", json!(l));
            r.set("at", nums(x));
            r.set("member", json!(m.member));
            r.set("rate", num(m.rate));
        }
    }
    Ok(r)
}
