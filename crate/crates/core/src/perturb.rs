//! Perturbations of polyhedral functions: local and global family membership, the
//! stability radii, and the explicit linear perturbation that destroys a local error
//! bound once its size exceeds the boundary slope.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{
    boundary_nearest, recession_box_vertices, strict_lp_feasible, vertices_uncapped, MixedSystem,
    RowKind,
};
use crate::linalg::{dist, dot, norm, scale, sub};
use crate::polyfun::{ActiveSet, AffinePiece, PolyhedralFunction, Region};
use crate::settings::Settings;
use crate::slopes::{
    boundary_slope_local, check_zero, global_boundary_slope, gradient_hull_distance,
    local_error_bound_modulus, ExtReal, TauProfile,
};

/// `p(u) = <slope, u - anchor>`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearPerturbation {
    pub anchor: Vec<f64>,
    pub slope: Vec<f64>,
}

impl LinearPerturbation {
    pub fn new(anchor: Vec<f64>, slope: Vec<f64>) -> Self {
        LinearPerturbation { anchor, slope }
    }

    /// `f + p`, same number of pieces.
    pub fn apply(&self, f: &PolyhedralFunction) -> Result<PolyhedralFunction> {
        f.plus_linear(&self.slope, &self.anchor)
    }
}

/// A polyhedral perturbing function `p`, so that `g = f + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralPerturbation {
    pub p: PolyhedralFunction,
    pub anchor: Vec<f64>,
}

impl PolyhedralPerturbation {
    pub fn apply(&self, f: &PolyhedralFunction) -> Result<PolyhedralFunction> {
        f.plus(&self.p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Linear(LinearPerturbation),
    Polyhedral(PolyhedralPerturbation),
    /// `g = f + c`
    Constant(f64),
}

impl Candidate {
    /// The perturbing function `p = g - f` as a polyhedral function on R^dim.
    pub fn perturbing_function(&self, dim: usize) -> Result<PolyhedralFunction> {
        match self {
            Candidate::Linear(l) => {
                check_dim(dim, l.slope.len())?;
                PolyhedralFunction::new(
                    dim,
                    vec![AffinePiece::new(l.slope.clone(), dot(&l.slope, &l.anchor))],
                )
            }
            Candidate::Polyhedral(pp) => {
                check_dim(dim, pp.p.dim())?;
                Ok(pp.p.clone())
            }
            Candidate::Constant(c) => {
                PolyhedralFunction::new(dim, vec![AffinePiece::new(vec![0.0; dim], -c)])
            }
        }
    }

    pub fn apply(&self, f: &PolyhedralFunction) -> Result<PolyhedralFunction> {
        match self {
            Candidate::Linear(l) => l.apply(f),
            Candidate::Polyhedral(pp) => pp.apply(f),
            Candidate::Constant(c) => Ok(f.shifted(*c)),
        }
    }

    /// `(w, c)` with `p(u) = <w, u> + c` when `p` is affine.
    pub fn as_affine(&self, dim: usize) -> Result<Option<(Vec<f64>, f64)>> {
        let p = self.perturbing_function(dim)?;
        let w = p.gradient(0).to_vec();
        if p.pieces().iter().all(|pc| pc.gradient == w) {
            let c = p
                .pieces()
                .iter()
                .map(|pc| -pc.offset)
                .fold(f64::NEG_INFINITY, f64::max);
            return Ok(Some((w, c)));
        }
        Ok(None)
    }

    fn anchor(&self) -> Option<&[f64]> {
        match self {
            Candidate::Linear(l) => Some(&l.anchor),
            Candidate::Polyhedral(pp) => Some(&pp.anchor),
            Candidate::Constant(_) => None,
        }
    }
}

/// Local perturbation families near a point: arbitrary, convex and linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalFamily {
    Arbitrary,
    Convex,
    Linear,
}

/// Global perturbation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalFamily {
    Strong,
    Weak,
    StrongLinear,
    WeakLinear,
}

impl GlobalFamily {
    fn is_linear(self) -> bool {
        matches!(self, GlobalFamily::StrongLinear | GlobalFamily::WeakLinear)
    }

    fn is_strong(self) -> bool {
        matches!(self, GlobalFamily::Strong | GlobalFamily::StrongLinear)
    }
}

/// `limsup_{x -> x̄} |p(x)| / |x - x̄|` for polyhedral `p` vanishing at `x̄`: the largest
/// active gradient norm.
pub fn local_rate(p: &PolyhedralFunction, xbar: &[f64], cfg: &Settings) -> Result<f64> {
    check_zero(p, xbar, cfg)?;
    let act = p.active_set(xbar, cfg.tol_active)?;
    Ok(act
        .indices
        .iter()
        .map(|&i| norm(p.gradient(i)))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalMembership {
    pub member: bool,
    pub rate: f64,
}

pub fn is_local_member(
    f: &PolyhedralFunction,
    xbar: &[f64],
    candidate: &Candidate,
    eps: f64,
    family: LocalFamily,
    cfg: &Settings,
) -> Result<LocalMembership> {
    check_zero(f, xbar, cfg)?;
    if let Some(a) = candidate.anchor() {
        check_dim(f.dim(), a.len())?;
        if dist(a, xbar) > cfg.tol_feas * (1.0 + norm(xbar)) {
            return Err(Error::Precondition(
                "the candidate must be anchored at the base point".into(),
            ));
        }
    }
    let p = candidate.perturbing_function(f.dim())?;
    if p.evaluate(xbar)?.abs() > cfg.tol_active * (1.0 + norm(xbar)) {
        return Err(Error::Precondition(
            "the perturbing function must vanish at the base point".into(),
        ));
    }
    let rate = local_rate(&p, xbar, cfg)?;
    let member = match family {
        LocalFamily::Linear => candidate.as_affine(f.dim())?.is_some() && rate <= eps,
        LocalFamily::Convex | LocalFamily::Arbitrary => rate <= eps,
    };
    Ok(LocalMembership { member, rate })
}

/// Witnesses produced while building the destabilizing perturbation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationCertificate {
    /// Nearest point of `bd ∂f(x̄)` to the origin.
    pub x_star: Vec<f64>,
    /// A point just outside `∂f(x̄)`, within `xi / 2` of `x_star`.
    pub xhat_star: Vec<f64>,
    /// Point with `f(xhat) < <xhat_star, xhat - x̄>`.
    pub xhat: Vec<f64>,
    /// Unit vector along `xhat - x̄`.
    pub z_star: Vec<f64>,
    pub xi: f64,
    /// `2 xi`, the promised bound on `Er g(x̄)`.
    pub claimed_er_bound: f64,
    /// `Er g(x̄)` recomputed on the perturbed function.
    pub verified_er: ExtReal,
}

impl PerturbationCertificate {
    pub fn claim_holds(&self, tol: f64) -> bool {
        self.verified_er.value() <= self.claimed_er_bound + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Destabilizer {
    pub g: PolyhedralFunction,
    pub perturbation: LinearPerturbation,
    pub certificate: PerturbationCertificate,
}

/// Default `xi` for a given margin `eps - |x*|`.
pub fn default_xi(eps: f64, x_star_norm: f64) -> f64 {
    0.1 * (eps - x_star_norm)
}

/// Builds `g = f + <-x* + xi z*, . - x̄>`, a linear perturbation of size below `eps` with
/// `Er g(x̄) <= 2 xi`. Requires `eps` to exceed the local boundary slope.
pub fn synthesize_destabilizer(
    f: &PolyhedralFunction,
    xbar: &[f64],
    eps: f64,
    xi: Option<f64>,
    cfg: &Settings,
) -> Result<Destabilizer> {
    check_zero(f, xbar, cfg)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidInput(format!(
            "eps must be positive and finite, got {eps}"
        )));
    }
    let n = f.dim();
    let sub_f = f.subdifferential(xbar, cfg)?;
    let bd = boundary_nearest(&sub_f, &vec![0.0; n], cfg)?;
    if bd.dist >= eps {
        return Err(Error::Domain(format!(
            "eps = {eps} does not exceed the boundary slope {}; no linear perturbation of that size destroys the error bound",
            bd.dist
        )));
    }
    let x_star = bd.point;
    let margin = eps - norm(&x_star);
    let xi = xi.unwrap_or_else(|| default_xi(eps, norm(&x_star)));
    if !(xi > 0.0 && xi < margin) {
        return Err(Error::InvalidInput(format!(
            "xi must lie in (0, {margin}), got {xi}"
        )));
    }

    let xhat_star: Vec<f64> = x_star
        .iter()
        .zip(&bd.outward)
        .map(|(x, v)| x + 0.5 * xi * v)
        .collect();
    if sub_f.contains(&xhat_star, cfg)? {
        return Err(Error::Computational {
            message: "the shifted boundary point stayed inside the subdifferential".into(),
            best: Some(xhat_star),
        });
    }

    // <a_i - xhat_star, d> < -f_i(x̄) for every piece, inside the unit box
    let mut sys = MixedSystem::new(n);
    for pc in f.pieces() {
        sys.push(sub(&pc.gradient, &xhat_star), RowKind::Lt, -pc.value(xbar));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        sys.push(e.clone(), RowKind::Le, 1.0);
        e[j] = -1.0;
        sys.push(e, RowKind::Le, 1.0);
    }
    let lp = strict_lp_feasible(&sys, cfg)?;
    let d = match (lp.feasible, lp.witness) {
        (true, Some(d)) if norm(&d) > 0.0 => d,
        (_, w) => {
            return Err(Error::Computational {
                message: "no point separates f from the shifted subgradient".into(),
                best: w,
            })
        }
    };
    let xhat: Vec<f64> = xbar.iter().zip(&d).map(|(x, di)| x + di).collect();
    let z_star = scale(&d, 1.0 / norm(&d));
    let slope: Vec<f64> = x_star
        .iter()
        .zip(&z_star)
        .map(|(x, z)| -x + xi * z)
        .collect();
    let perturbation = LinearPerturbation::new(xbar.to_vec(), slope);
    let g = perturbation.apply(f)?;
    let verified_er = local_error_bound_modulus(&g, xbar, cfg)?;
    Ok(Destabilizer {
        g,
        perturbation,
        certificate: PerturbationCertificate {
            x_star,
            xhat_star,
            xhat,
            z_star,
            xi,
            claimed_er_bound: 2.0 * xi,
            verified_er,
        },
    })
}

/// Radius of local error bounds at `x̄`, the same for arbitrary, convex and linear
/// perturbations: the boundary slope `d(0, bd ∂f(x̄))`.
pub fn local_radius(f: &PolyhedralFunction, xbar: &[f64], cfg: &Settings) -> Result<ExtReal> {
    boundary_slope_local(f, xbar, cfg)
}

/// `max_i |a_i|`, the least Lipschitz constant of `p`. A piece that never attains
/// the maximum has its gradient in the hull of the others (compare along rays), so
/// taking every piece loses nothing. For convex `p` this is also the least `xi` with
/// `|p(u) - p(x)| <= xi |u - x|` for all `u`, whatever `x`.
pub fn global_lipschitz_bound(p: &PolyhedralFunction) -> f64 {
    p.pieces()
        .iter()
        .map(|pc| norm(&pc.gradient))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalPerturbationWitness {
    /// Anchor in `{f = 0}`.
    pub x: Vec<f64>,
    pub xi: f64,
    pub p_at_x: f64,
    /// `tau(f, x, xi, |p(x)|)`; strong families only.
    pub tau_value: Option<ExtReal>,
    /// `xi + |∂f|_bd - tau`; strong families only.
    pub condition: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMembership {
    pub member: bool,
    pub witness: Option<GlobalPerturbationWitness>,
    /// Why the candidate failed, when it did.
    pub reason: Option<String>,
}

impl GlobalMembership {
    fn reject(reason: impl Into<String>) -> Self {
        GlobalMembership {
            member: false,
            witness: None,
            reason: Some(reason.into()),
        }
    }
}

/// Anchor points in `{f = 0}`: one per zero-level active-set pattern, then the vertices
/// of the zero-level faces.
pub fn zero_level_anchors(f: &PolyhedralFunction, cfg: &Settings) -> Result<Vec<Vec<f64>>> {
    let pats = f.occurring_patterns(Region::ZeroLevel, cfg)?;
    let mut out: Vec<Vec<f64>> = pats.iter().map(|p| p.point.clone()).collect();
    for pat in &pats {
        let j = pat.set.indices[0];
        let mut face = f.cell(&pat.set)?;
        face.push_equality(f.gradient(j).to_vec(), f.pieces()[j].offset);
        for v in vertices_uncapped(&face, cfg) {
            if !out.iter().any(|u| dist(u, &v) <= 1e-9 * (1.0 + norm(&v))) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Decides whether `f + p` belongs to the given global family for some anchor in
/// `{f = 0}`. The calmness constant used is the exact Lipschitz constant of `p`.
pub fn is_global_member(
    f: &PolyhedralFunction,
    candidate: &Candidate,
    eps: f64,
    family: GlobalFamily,
    cfg: &Settings,
) -> Result<GlobalMembership> {
    if f.sublevel_polyhedron().is_empty(cfg)? {
        return Err(Error::Precondition("the solution set of f is empty".into()));
    }
    let p = candidate.perturbing_function(f.dim())?;
    let affine = candidate.as_affine(f.dim())?;
    if family.is_linear() && affine.is_none() {
        return Ok(GlobalMembership::reject("the perturbation is not linear"));
    }
    let g = candidate.apply(f)?;
    if g.sublevel_polyhedron().is_empty(cfg)? {
        return Ok(GlobalMembership::reject(
            "the perturbed function has an empty solution set",
        ));
    }
    let xi = match &affine {
        Some((w, _)) => norm(w),
        None => global_lipschitz_bound(&p),
    };
    if !family.is_strong() && xi > eps {
        return Ok(GlobalMembership::reject(format!(
            "Lipschitz constant {xi} of the perturbation exceeds eps = {eps}"
        )));
    }

    let mut anchors = Vec::new();
    if let Some(a) = candidate.anchor() {
        check_dim(f.dim(), a.len())?;
        if f.value(a).abs() <= cfg.tol_active * (1.0 + norm(a)) {
            anchors.push(a.to_vec());
        }
    }
    anchors.extend(zero_level_anchors(f, cfg)?);
    if anchors.is_empty() {
        return Ok(GlobalMembership::reject(
            "f has no zero level set to anchor the perturbation",
        ));
    }
    let bd = if family.is_strong() {
        global_boundary_slope(f, cfg)?.value()
    } else {
        0.0
    };

    let mut last_reason = String::from("no anchor satisfies the conditions");
    for x in anchors {
        let px = p.value(&x);
        if family.is_linear() && px.abs() > cfg.tol_active * (1.0 + norm(&x)) {
            last_reason = "a linear perturbation must vanish at its anchor in {f = 0}".into();
            continue;
        }
        let delta = if family.is_linear() { 0.0 } else { px.abs() };
        if !family.is_strong() {
            return Ok(GlobalMembership {
                member: true,
                witness: Some(GlobalPerturbationWitness {
                    x,
                    xi,
                    p_at_x: px,
                    tau_value: None,
                    condition: None,
                }),
                reason: None,
            });
        }
        let t = TauProfile::new(f, &x, cfg)?.eval(xi, delta)?;
        let condition = xi + bd - t.value();
        let witness = GlobalPerturbationWitness {
            x,
            xi,
            p_at_x: px,
            tau_value: Some(t),
            condition: Some(condition),
        };
        if condition <= eps + 1e-12 {
            return Ok(GlobalMembership {
                member: true,
                witness: Some(witness),
                reason: None,
            });
        }
        last_reason =
            format!("xi + boundary slope - tau = {condition} exceeds eps = {eps} at every anchor");
    }
    Ok(GlobalMembership::reject(last_reason))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rigidity {
    pub rigid: bool,
    pub witness_cell: Option<ActiveSet>,
}

/// Detects an unbounded cell that carries subgradients of norm at most
/// `|∂f|_bd - eps` along a recession direction on which `f` does not decrease. When
/// one exists and `eps <= |∂f|_bd`, every strong `eps`-perturbation of `f` is `f`
/// plus a constant.
pub fn rigidity_check(f: &PolyhedralFunction, eps: f64, cfg: &Settings) -> Result<Rigidity> {
    if f.occurring_active_sets(Region::ZeroLevel, cfg)?.is_empty() {
        return Err(Error::Precondition(
            "the zero level set of f is empty".into(),
        ));
    }
    let bd = global_boundary_slope(f, cfg)?.value();
    for pat in f.occurring_patterns(Region::Anywhere, cfg)? {
        let hd = gradient_hull_distance(f, &pat.set, cfg)?;
        if hd > bd - eps + cfg.tol_geo {
            continue;
        }
        let a = f.gradient(pat.set.indices[0]);
        let cell = f.cell(&pat.set)?;
        let climbs = recession_box_vertices(&cell, cfg)
            .iter()
            .filter(|r| norm(r) > 1e-12)
            .any(|r| dot(a, r) >= -1e-12 * norm(r) * norm(a).max(1.0));
        if climbs {
            return Ok(Rigidity {
                rigid: true,
                witness_cell: Some(pat.set),
            });
        }
    }
    Ok(Rigidity {
        rigid: false,
        witness_cell: None,
    })
}

/// Lower and upper estimates for the radius of global error bounds: strong families
/// have radius at least `|∂f|_bd`, weak families at most `|∂f|_bd`.
pub fn global_radius_bounds(f: &PolyhedralFunction, cfg: &Settings) -> Result<(ExtReal, ExtReal)> {
    if f.sublevel_polyhedron().is_empty(cfg)? {
        return Err(Error::Domain("the solution set of f is empty".into()));
    }
    let bd = global_boundary_slope(f, cfg)?;
    Ok((bd, bd))
}

/// For `eps` above the global boundary slope: a weak linear `eps`-perturbation with
/// `Er g(x) <= 2 xi`, built at the zero-level anchor of least local boundary slope.
pub fn global_destabilizer(
    f: &PolyhedralFunction,
    eps: f64,
    xi: Option<f64>,
    cfg: &Settings,
) -> Result<Destabilizer> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for pat in f.occurring_patterns(Region::ZeroLevel, cfg)? {
        let b = boundary_slope_local(f, &pat.point, cfg)?.value();
        if best.as_ref().is_none_or(|(v, _)| b < *v) {
            best = Some((b, pat.point));
        }
    }
    let (_, x) = best.ok_or_else(|| Error::Domain("the zero level set of f is empty".into()))?;
    synthesize_destabilizer(f, &x, eps, xi, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e13() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])
            .unwrap()
    }

    fn max0x() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[0.0], 0.0), (&[1.0], 0.0)]).unwrap()
    }

    fn max_x_neg1() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[0.0], 1.0)]).unwrap()
    }

    fn zero() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[0.0], 0.0)]).unwrap()
    }

    fn cfg() -> Settings {
        Settings::default()
    }

    fn linear(anchor: f64, slope: f64) -> Candidate {
        Candidate::Linear(LinearPerturbation::new(vec![anchor], vec![slope]))
    }

    #[test]
    fn local_rates() {
        let c = cfg();
        let lin = PolyhedralFunction::from_rows(2, &[(&[3.0, 4.0], 0.0)]).unwrap();
        assert_eq!(local_rate(&lin, &[0.0, 0.0], &c).unwrap(), 5.0);
        assert_eq!(local_rate(&max0x(), &[0.0], &c).unwrap(), 1.0);
        let abs = PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[-1.0], 0.0)]).unwrap();
        assert_eq!(local_rate(&abs, &[0.0], &c).unwrap(), 1.0);
        assert!(local_rate(&abs, &[1.0], &c).is_err());
    }

    #[test]
    fn local_membership() {
        let c = cfg();
        let f = e13();
        let m =
            is_local_member(&f, &[1.0], &linear(1.0, 0.5), 0.6, LocalFamily::Linear, &c).unwrap();
        assert!(m.member);
        let m =
            is_local_member(&f, &[1.0], &linear(1.0, 1.1), 1.0, LocalFamily::Linear, &c).unwrap();
        assert!(!m.member);
        // |u - 1|
        let p = PolyhedralFunction::from_rows(1, &[(&[1.0], 1.0), (&[-1.0], -1.0)]).unwrap();
        let cand = Candidate::Polyhedral(PolyhedralPerturbation {
            p,
            anchor: vec![1.0],
        });
        let m = is_local_member(&f, &[1.0], &cand, 1.0, LocalFamily::Convex, &c).unwrap();
        assert!(m.member && m.rate == 1.0);
        let m = is_local_member(&f, &[1.0], &cand, 1.0, LocalFamily::Linear, &c).unwrap();
        assert!(!m.member);
        assert!(
            is_local_member(&f, &[1.0], &linear(0.0, 0.5), 1.0, LocalFamily::Linear, &c).is_err()
        );
    }

    #[test]
    fn destabilizes_max0x() {
        let c = cfg();
        let d = synthesize_destabilizer(&max0x(), &[0.0], 0.2, Some(0.05), &c).unwrap();
        let cert = &d.certificate;
        assert_eq!(cert.x_star, vec![0.0]);
        assert!((cert.xhat_star[0] + 0.025).abs() < 1e-15);
        assert!((cert.xhat[0] + 1.0).abs() < 1e-9);
        assert_eq!(cert.z_star, vec![-1.0]);
        assert!((d.perturbation.slope[0] + 0.05).abs() < 1e-15);
        assert!((cert.verified_er.value() - 0.05).abs() < 1e-12);
        assert!(cert.claim_holds(1e-9));
    }

    #[test]
    fn destabilizes_e13() {
        let c = cfg();
        let d = synthesize_destabilizer(&e13(), &[1.0], 1.2, Some(0.1), &c).unwrap();
        let cert = &d.certificate;
        assert_eq!(cert.x_star, vec![-1.0]);
        assert!((cert.xhat_star[0] + 0.95).abs() < 1e-15);
        assert!((cert.xhat[0] - 2.0).abs() < 1e-9);
        assert_eq!(cert.z_star, vec![1.0]);
        assert!((d.perturbation.slope[0] - 1.1).abs() < 1e-15);
        assert!((cert.verified_er.value() - 0.1).abs() < 1e-12);
        assert!(norm(&d.perturbation.slope) < 1.2);
    }

    #[test]
    fn no_destabilizer_below_radius() {
        let c = cfg();
        assert!(matches!(
            synthesize_destabilizer(&e13(), &[1.0], 0.8, None, &c),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            synthesize_destabilizer(&e13(), &[1.0], 1.2, Some(0.3), &c),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn local_radii() {
        let c = cfg();
        assert_eq!(local_radius(&e13(), &[1.0], &c).unwrap().value(), 1.0);
        assert_eq!(local_radius(&max0x(), &[0.0], &c).unwrap().value(), 0.0);
        let abs = PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[-1.0], 0.0)]).unwrap();
        assert_eq!(local_radius(&abs, &[0.0], &c).unwrap().value(), 1.0);
    }

    #[test]
    fn lipschitz_bounds() {
        let lin = PolyhedralFunction::from_rows(1, &[(&[-0.7], 0.0)]).unwrap();
        assert_eq!(global_lipschitz_bound(&lin), 0.7);
        assert_eq!(global_lipschitz_bound(&e13()), 2.0);
        assert_eq!(global_lipschitz_bound(&zero()), 0.0);
    }

    #[test]
    fn global_membership_on_max_x_neg1() {
        let c = cfg();
        let f = max_x_neg1();
        for cst in [-0.99, -0.5, 0.0, 0.5, 0.99] {
            let m = is_global_member(&f, &Candidate::Constant(cst), 0.5, GlobalFamily::Strong, &c)
                .unwrap();
            assert!(m.member, "c = {cst}");
            let w = m.witness.unwrap();
            assert_eq!(w.x, vec![0.0]);
            assert_eq!(w.xi, 0.0);
            assert_eq!(w.tau_value.unwrap().value(), 1.0);
        }
        let m =
            is_global_member(&f, &Candidate::Constant(1.0), 0.5, GlobalFamily::Strong, &c).unwrap();
        assert!(!m.member);
        let m = is_global_member(&f, &linear(0.0, 0.5), 0.9, GlobalFamily::Strong, &c).unwrap();
        assert!(!m.member);
        let m = is_global_member(&f, &linear(0.0, 0.5), 0.5, GlobalFamily::WeakLinear, &c).unwrap();
        assert!(m.member);
        let m =
            is_global_member(&f, &linear(0.0, 0.5), 0.5, GlobalFamily::StrongLinear, &c).unwrap();
        assert!(!m.member);
    }

    #[test]
    fn f_is_its_own_perturbation() {
        let c = cfg();
        for f in [e13(), max_x_neg1(), zero(), max0x()] {
            for eps in [0.0, 0.3] {
                let m =
                    is_global_member(&f, &Candidate::Constant(0.0), eps, GlobalFamily::Strong, &c)
                        .unwrap();
                assert!(m.member);
            }
        }
    }

    #[test]
    fn rigidity() {
        let c = cfg();
        let r = rigidity_check(&zero(), 0.0, &c).unwrap();
        assert!(r.rigid);
        let r = rigidity_check(&max_x_neg1(), 0.5, &c).unwrap();
        assert!(r.rigid);
        assert_eq!(r.witness_cell.unwrap(), ActiveSet::new(vec![1]));
        assert!(!rigidity_check(&e13(), 0.5, &c).unwrap().rigid);
    }

    #[test]
    fn global_radii() {
        let c = cfg();
        let (lo, hi) = global_radius_bounds(&e13(), &c).unwrap();
        assert_eq!((lo.value(), hi.value()), (1.0, 1.0));
        let (lo, _) = global_radius_bounds(&max_x_neg1(), &c).unwrap();
        assert_eq!(lo.value(), 1.0);
        let (lo, _) = global_radius_bounds(&zero(), &c).unwrap();
        assert_eq!(lo.value(), 0.0);
        let pos = PolyhedralFunction::from_rows(1, &[(&[0.0], -1.0)]).unwrap();
        assert!(matches!(
            global_radius_bounds(&pos, &c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn weak_linear_destabilization_above_global_radius() {
        let c = cfg();
        let d = global_destabilizer(&e13(), 1.2, Some(0.05), &c).unwrap();
        assert!(d.certificate.claim_holds(1e-9));
        let cand = Candidate::Linear(d.perturbation.clone());
        let m = is_global_member(&e13(), &cand, 1.2, GlobalFamily::WeakLinear, &c).unwrap();
        assert!(m.member);
    }
}
