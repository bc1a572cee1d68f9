//! Built-in instances and the checks that `verify` runs against them.

use serde::Serialize;
use serde_json::{json, Value};

use super::report::num;
use crate::error::Result;
use crate::oracle::{estimate_er_global, estimate_er_local, Estimate, McConfig};
use crate::perturb::{
    global_radius_bounds, is_global_member, rigidity_check, synthesize_destabilizer, Candidate,
    GlobalFamily, LinearPerturbation,
};
use crate::polyfun::{PolyhedralFunction, Region};
use crate::settings::Settings;
use crate::slopes::{
    boundary_slope_local, global_boundary_slope, global_outer_slope, local_error_bound_modulus,
    tau, TauQuery,
};

pub const INSTANCES: &[(&str, &str)] = &[
    ("e13", include_str!("../../data/e13.json")),
    ("zero", include_str!("../../data/zero.json")),
    ("max0x", include_str!("../../data/max0x.json")),
    ("max_x_neg1", include_str!("../../data/max_x_neg1.json")),
    (
        "geometric_trunc4",
        include_str!("../../data/geometric_trunc4.json"),
    ),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    INSTANCES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Relative tolerance for oracle comparisons.
pub const ORACLE_TOL: f64 = 0.05;
const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub instance: String,
    pub quantity: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol
}

/// Oracle agreement: `|est - exact| / max(exact, 1) <= 5%`, or both infinite.
pub fn oracle_agrees(exact: f64, est: f64) -> bool {
    if exact.is_infinite() || est.is_infinite() {
        return exact == est;
    }
    (est - exact).abs() / exact.max(1.0) <= ORACLE_TOL
}

pub struct Checks {
    instance: String,
    pub items: Vec<Check>,
}

impl Checks {
    pub fn new(instance: &str) -> Self {
        Checks {
            instance: instance.into(),
            items: Vec::new(),
        }
    }

    fn push(&mut self, quantity: String, expected: Value, observed: Value, pass: bool) {
        self.items.push(Check {
            instance: self.instance.clone(),
            quantity,
            expected,
            observed,
            pass,
        });
    }

    pub fn exact(&mut self, quantity: impl Into<String>, expected: f64, observed: f64) {
        let pass = close(expected, observed, EXACT_TOL);
        self.push(quantity.into(), num(expected), num(observed), pass);
    }

    pub fn flag(&mut self, quantity: impl Into<String>, expected: bool, observed: bool) {
        self.push(
            quantity.into(),
            json!(expected),
            json!(observed),
            expected == observed,
        );
    }

    pub fn points(&mut self, quantity: impl Into<String>, expected: &[f64], observed: &[Vec<f64>]) {
        let pass = expected.len() == observed.len()
            && expected
                .iter()
                .zip(observed)
                .all(|(e, o)| o.len() == 1 && close(*e, o[0], 1e-7));
        let obs: Vec<Value> = observed.iter().map(|p| super::report::nums(p)).collect();
        self.push(
            quantity.into(),
            super::report::nums(expected),
            json!(obs),
            pass,
        );
    }

    pub fn oracle(&mut self, quantity: impl Into<String>, exact: f64, est: &Estimate) {
        let pass = oracle_agrees(exact, est.value);
        self.push(
            quantity.into(),
            num(exact),
            json!({ "estimate": num(est.value), "accepted_samples": est.accepted() }),
            pass,
        );
    }

    pub fn error(&mut self, quantity: impl Into<String>, err: &crate::Error) {
        self.push(quantity.into(), Value::Null, json!(err.to_string()), false);
    }
}

fn parse(name: &str) -> PolyhedralFunction {
    super::spec::FunctionSpec::parse(lookup(name).expect("built-in instance"))
        .and_then(|s| s.to_function())
        .expect("built-in instances are valid")
}

fn zero_points(f: &PolyhedralFunction, cfg: &Settings) -> Result<Vec<Vec<f64>>> {
    Ok(f.occurring_patterns(Region::ZeroLevel, cfg)?
        .into_iter()
        .map(|p| p.point)
        .collect())
}

/// Oracle cross-checks for one function: the global modulus and the local modulus at
/// each zero-level representative (or at `at` when given).
pub fn oracle_checks(
    out: &mut Checks,
    f: &PolyhedralFunction,
    at: Option<&[f64]>,
    mc: &McConfig,
    cfg: &Settings,
) -> Result<()> {
    if !f.sublevel_polyhedron().is_empty(cfg)? {
        let exact = global_outer_slope(f, cfg)?.value();
        out.oracle("er_global oracle", exact, &estimate_er_global(f, mc, cfg)?);
    }
    let points = match at {
        Some(x) => vec![x.to_vec()],
        None => zero_points(f, cfg)?,
    };
    for x in points {
        let exact = local_error_bound_modulus(f, &x, cfg)?.value();
        let est = estimate_er_local(f, &x, mc, cfg)?;
        out.oracle(format!("er_local oracle at {x:?}"), exact, &est);
    }
    Ok(())
}

fn e13(c: &mut Checks, cfg: &Settings) -> Result<()> {
    let f = parse("e13");
    c.exact(
        "boundary_global",
        1.0,
        global_boundary_slope(&f, cfg)?.value(),
    );
    c.exact("outer_global", 2.0, global_outer_slope(&f, cfg)?.value());
    c.points("zero-level patterns", &[1.0, 2.5], &zero_points(&f, cfg)?);
    for (eps, delta, want) in [
        (0.3, 0.5, 1.0),
        (0.0, 0.9, 1.0),
        (0.9, 0.0, 1.0),
        (0.5, 0.5, 0.0),
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
    ] {
        let q = TauQuery {
            x: vec![1.0],
            eps,
            delta,
        };
        c.exact(
            format!("tau(1, {eps}, {delta})"),
            want,
            tau(&f, &q, cfg)?.value(),
        );
    }
    c.exact(
        "er_local at 1",
        2.0,
        local_error_bound_modulus(&f, &[1.0], cfg)?.value(),
    );
    c.exact(
        "boundary_local at 1",
        1.0,
        boundary_slope_local(&f, &[1.0], cfg)?.value(),
    );
    c.exact(
        "boundary_local at 2.5",
        2.0,
        boundary_slope_local(&f, &[2.5], cfg)?.value(),
    );
    let (lo, hi) = global_radius_bounds(&f, cfg)?;
    c.exact("global radius lower", 1.0, lo.value());
    c.exact("global radius upper", 1.0, hi.value());
    let d = synthesize_destabilizer(&f, &[1.0], 1.2, Some(0.1), cfg)?;
    c.exact("destabilizer slope", 1.1, d.perturbation.slope[0]);
    c.exact(
        "destabilized er_local",
        0.1,
        d.certificate.verified_er.value(),
    );
    c.flag(
        "not rigid at eps 0.5",
        false,
        rigidity_check(&f, 0.5, cfg)?.rigid,
    );
    Ok(())
}

fn zero(c: &mut Checks, cfg: &Settings) -> Result<()> {
    let f = parse("zero");
    c.exact(
        "er_local at 0",
        f64::INFINITY,
        local_error_bound_modulus(&f, &[0.0], cfg)?.value(),
    );
    c.exact(
        "boundary_local at 0",
        0.0,
        boundary_slope_local(&f, &[0.0], cfg)?.value(),
    );
    c.flag("rigid at eps 0", true, rigidity_check(&f, 0.0, cfg)?.rigid);
    Ok(())
}

fn max0x(c: &mut Checks, cfg: &Settings) -> Result<()> {
    let f = parse("max0x");
    let sub = f.subdifferential(&[0.0], cfg)?;
    let lo = sub
        .generators
        .iter()
        .map(|g| g[0])
        .fold(f64::INFINITY, f64::min);
    let hi = sub
        .generators
        .iter()
        .map(|g| g[0])
        .fold(f64::NEG_INFINITY, f64::max);
    c.exact("subdifferential at 0, left end", 0.0, lo);
    c.exact("subdifferential at 0, right end", 1.0, hi);
    c.exact(
        "er_local at 0",
        1.0,
        local_error_bound_modulus(&f, &[0.0], cfg)?.value(),
    );
    c.exact(
        "boundary_local at 0",
        0.0,
        boundary_slope_local(&f, &[0.0], cfg)?.value(),
    );
    let d = synthesize_destabilizer(&f, &[0.0], 0.2, Some(0.05), cfg)?;
    c.exact(
        "destabilized er_local",
        0.05,
        d.certificate.verified_er.value(),
    );
    Ok(())
}

fn max_x_neg1(c: &mut Checks, cfg: &Settings) -> Result<()> {
    let f = parse("max_x_neg1");
    c.exact(
        "boundary_global",
        1.0,
        global_boundary_slope(&f, cfg)?.value(),
    );
    let cases = [
        (0.0, 0.0, 1.0),
        (0.0, 0.5, 1.0),
        (0.0, 0.99, 1.0),
        (0.0, 1.0, 0.0),
        (0.1, 0.0, 0.0),
        (0.5, 0.0, 0.0),
    ];
    for (eps, delta, want) in cases {
        let q = TauQuery {
            x: vec![0.0],
            eps,
            delta,
        };
        c.exact(
            format!("tau(0, {eps}, {delta})"),
            want,
            tau(&f, &q, cfg)?.value(),
        );
    }
    for cst in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let m = is_global_member(
            &f,
            &Candidate::Constant(cst),
            0.5,
            GlobalFamily::Strong,
            cfg,
        )?;
        c.flag(
            format!("f + {cst} strong member at eps 0.5"),
            true,
            m.member,
        );
    }
    let lin = Candidate::Linear(LinearPerturbation::new(vec![0.0], vec![0.5]));
    let m = is_global_member(&f, &lin, 0.9, GlobalFamily::Strong, cfg)?;
    c.flag("slope 0.5 strong member at eps 0.9", false, m.member);
    let m = is_global_member(&f, &lin, 0.5, GlobalFamily::WeakLinear, cfg)?;
    c.flag("slope 0.5 weak linear member at eps 0.5", true, m.member);
    let m = is_global_member(&f, &lin, 0.5, GlobalFamily::Strong, cfg)?;
    c.flag("slope 0.5 strong member at eps 0.5", false, m.member);
    c.flag(
        "rigid at eps 0.5",
        true,
        rigidity_check(&f, 0.5, cfg)?.rigid,
    );
    Ok(())
}

/// Only the facts the truncation shares with the full function are checked.
fn geometric_trunc4(c: &mut Checks, cfg: &Settings) -> Result<()> {
    let f = parse("geometric_trunc4");
    c.points("zero-level patterns", &[0.0], &zero_points(&f, cfg)?);
    c.exact(
        "boundary_global",
        1.0,
        global_boundary_slope(&f, cfg)?.value(),
    );
    Ok(())
}

type Runner = fn(&mut Checks, &Settings) -> Result<()>;

/// Every built-in instance: its known values, then oracle agreement.
pub fn verify_corpus(mc: &McConfig, cfg: &Settings) -> Vec<Check> {
    let runners: [(&str, Runner); 5] = [
        ("e13", e13),
        ("zero", zero),
        ("max0x", max0x),
        ("max_x_neg1", max_x_neg1),
        ("geometric_trunc4", geometric_trunc4),
    ];
    let mut all = Vec::new();
    for (name, run) in runners {
        let mut c = Checks::new(name);
        if let Err(e) = run(&mut c, cfg) {
            c.error("known values", &e);
        }
        let f = parse(name);
        if let Err(e) = oracle_checks(&mut c, &f, None, mc, cfg) {
            c.error("oracle", &e);
        }
        all.extend(c.items);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses() {
        for (name, _) in INSTANCES {
            let f = parse(name);
            assert_eq!(f.dim(), 1);
        }
    }

    #[test]
    fn corpus_verifies() {
        let mc = McConfig {
            samples: 20_000,
            ..McConfig::default()
        };
        let checks = verify_corpus(&mc, &Settings::default());
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(checks.len() > 40);
    }
}
