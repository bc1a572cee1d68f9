//! Error bound moduli and subdifferential slopes, computed exactly from the finitely
//! many active-set patterns of a polyhedral function.
//!
//! Local quantities at a point `x̄` with `f(x̄) = 0`:
//! * `Er f(x̄)` equals the strict outer slope, the least distance from 0 to the hull of
//!   gradients indexed by some `D` in the family returned by [`dee_family`];
//! * the boundary slope `d(0, bd ∂f(x̄))`, a lower bound for it and the radius of
//!   local error bound stability.
//!
//! Global quantities range over patterns on `{f > 0}` and `{f = 0}` instead.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{
    boundary_distance, lineality_space, min_norm_point, recession_box_vertices, strict_lp_feasible,
    vertices_uncapped, MixedSystem, Polyhedron, RowKind,
};
use crate::linalg::{dist, dot, norm};
use crate::polyfun::{ActiveSet, PolyhedralFunction, Region};
use crate::settings::Settings;

/// A nonnegative real or `+inf`. Infinity only arises from infima over empty sets.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    pub fn new(v: f64) -> Self {
        debug_assert!(!v.is_nan());
        ExtReal(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    /// Minimum of a sequence; `+inf` for an empty one.
    pub fn min_of<I: IntoIterator<Item = f64>>(it: I) -> ExtReal {
        ExtReal(it.into_iter().fold(f64::INFINITY, f64::min))
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Every modulus and slope of `f`. Local fields are present only when a base point
/// was supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub er_local: Option<ExtReal>,
    pub strict_outer_local: Option<ExtReal>,
    pub boundary_local: Option<ExtReal>,
    pub er_global: ExtReal,
    pub outer_global: ExtReal,
    pub boundary_global: ExtReal,
    pub anchor: Option<Vec<f64>>,
}

impl SlopeReport {
    /// A global error bound holds exactly when the global outer slope is positive.
    pub fn has_global_error_bound(&self) -> bool {
        self.outer_global.value() > 0.0
    }
}

/// Point and level-set offsets for `tau(f, x, eps, delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauQuery {
    pub x: Vec<f64>,
    pub eps: f64,
    pub delta: f64,
}

pub(crate) fn check_zero(f: &PolyhedralFunction, x: &[f64], cfg: &Settings) -> Result<()> {
    let v = f.evaluate(x)?;
    if v.abs() > cfg.tol_active * (1.0 + norm(x)) {
        return Err(Error::Precondition(format!(
            "f must vanish at the base point, got f(x) = {v}"
        )));
    }
    Ok(())
}

/// Active subsets `D ⊆ I(x̄)` admitting `d` with `<a_i, d> = 1` on `D` and `< 1` on
/// `I(x̄) \ D`.
pub fn dee_family(f: &PolyhedralFunction, xbar: &[f64], cfg: &Settings) -> Result<Vec<ActiveSet>> {
    let act = f.active_set(xbar, cfg.tol_active)?;
    f.check_caps(cfg)?;
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    dee_dfs(f, &act.indices, 0, &mut chosen, cfg, &mut out)?;
    out.sort();
    Ok(out)
}

fn dee_dfs(
    f: &PolyhedralFunction,
    active: &[usize],
    start: usize,
    chosen: &mut Vec<usize>,
    cfg: &Settings,
    out: &mut Vec<ActiveSet>,
) -> Result<()> {
    for k in start..active.len() {
        chosen.push(active[k]);
        let mut sys = MixedSystem::new(f.dim());
        for &i in active {
            let kind = if chosen.contains(&i) {
                RowKind::Eq
            } else {
                RowKind::Lt
            };
            sys.push(f.gradient(i).to_vec(), kind, 1.0);
        }
        let r = strict_lp_feasible(&sys, cfg)?;
        if r.closed_feasible {
            if r.feasible {
                out.push(ActiveSet::new(chosen.clone()));
            }
            dee_dfs(f, active, k + 1, chosen, cfg, out)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// `d(0, conv{a_i : i in D})`
pub fn gradient_hull_distance(
    f: &PolyhedralFunction,
    d: &ActiveSet,
    cfg: &Settings,
) -> Result<f64> {
    Ok(min_norm_point(&f.gradients_of(d), cfg)?.dist)
}

/// `Er f(x̄)`, which coincides with the strict outer slope at `x̄`.
pub fn local_error_bound_modulus(
    f: &PolyhedralFunction,
    xbar: &[f64],
    cfg: &Settings,
) -> Result<ExtReal> {
    check_zero(f, xbar, cfg)?;
    let mut best = ExtReal::INFINITY;
    for d in dee_family(f, xbar, cfg)? {
        best = best.min(gradient_hull_distance(f, &d, cfg)?.into());
    }
    Ok(best)
}

/// `d(0, bd ∂f(x̄))`
pub fn boundary_slope_local(
    f: &PolyhedralFunction,
    xbar: &[f64],
    cfg: &Settings,
) -> Result<ExtReal> {
    check_zero(f, xbar, cfg)?;
    let sub = f.subdifferential(xbar, cfg)?;
    Ok(boundary_distance(&sub, &vec![0.0; f.dim()], cfg)?.into())
}

/// `inf_{f(x) > 0} d(0, ∂f(x))`, equal to the global error bound modulus.
pub fn global_outer_slope(f: &PolyhedralFunction, cfg: &Settings) -> Result<ExtReal> {
    let mut best = ExtReal::INFINITY;
    for d in f.occurring_active_sets(Region::Positive, cfg)? {
        best = best.min(gradient_hull_distance(f, &d, cfg)?.into());
    }
    Ok(best)
}

/// `inf_{f(x) = 0} d(0, bd ∂f(x))`
pub fn global_boundary_slope(f: &PolyhedralFunction, cfg: &Settings) -> Result<ExtReal> {
    let origin = vec![0.0; f.dim()];
    let mut best = ExtReal::INFINITY;
    for d in f.occurring_active_sets(Region::ZeroLevel, cfg)? {
        best = best.min(boundary_distance(&f.gradients_of(&d), &origin, cfg)?.into());
    }
    Ok(best)
}

/// Everything `tau` needs about one cell, independent of `eps` and `delta`.
#[derive(Debug, Clone)]
struct CellProfile {
    hull_dist: f64,
    /// The cell contains a line along which `f` or `|u - x|` grows without bound.
    line_escape_any_eps: bool,
    /// The cell contains a line, but `f` is constant along it.
    has_lines: bool,
    /// `(<a, r>, |r|)` over generators of the recession directions of the slice.
    rays: Vec<(f64, f64)>,
    /// `(f(v), |v - x|)` over vertices of the slice.
    vertices: Vec<(f64, f64)>,
}

impl CellProfile {
    fn reachable(&self, eps: f64, delta: f64) -> bool {
        if self.line_escape_any_eps || (self.has_lines && eps > 0.0) {
            return true;
        }
        if self
            .rays
            .iter()
            .any(|(ar, rn)| ar + eps * rn > 1e-12 * rn.max(1.0))
        {
            return true;
        }
        self.vertices.iter().any(|(fv, dv)| {
            let h = fv + eps * dv + delta;
            h >= -1e-12 * (1.0 + fv.abs() + eps * dv + delta)
        })
    }
}

#[derive(Debug, Clone)]
enum TauBranch {
    /// `0 ∈ int ∂f(x)`: tau is the boundary distance, whatever `eps` and `delta`.
    Interior(f64),
    Cells(Vec<CellProfile>),
}

/// Precomputed data for `tau(f, x, ., .)` at a fixed point, so that many `(eps, delta)`
/// pairs can be evaluated cheaply.
#[derive(Debug, Clone)]
pub struct TauProfile {
    branch: TauBranch,
}

impl TauProfile {
    pub fn new(f: &PolyhedralFunction, x: &[f64], cfg: &Settings) -> Result<Self> {
        check_dim(f.dim(), x.len())?;
        if f.dim() > cfg.max_tau_dim {
            return Err(Error::Unsupported(format!(
                "exact tau is limited to dimension {}; use the sampling estimator in dimension {}",
                cfg.max_tau_dim,
                f.dim()
            )));
        }
        check_zero(f, x, cfg)?;
        let origin = vec![0.0; f.dim()];
        let sub = f.subdifferential(x, cfg)?;
        if sub.interior_contains(&origin, cfg)? {
            // 0 in the interior makes x the unique point of S_f, so no other zero-level
            // pattern can exist.
            let zero = f.occurring_active_sets(Region::ZeroLevel, cfg)?;
            let here = f.active_set(x, cfg.tol_active)?;
            if zero != vec![here] {
                return Err(Error::computational(
                    "0 lies in the interior of the subdifferential but the zero level set is not a single point",
                ));
            }
            return Ok(TauProfile {
                branch: TauBranch::Interior(boundary_distance(&sub, &origin, cfg)?),
            });
        }
        let mut cells = Vec::new();
        for pat in f.occurring_patterns(Region::Anywhere, cfg)? {
            cells.push(cell_profile(f, &pat.set, x, cfg)?);
        }
        Ok(TauProfile {
            branch: TauBranch::Cells(cells),
        })
    }

    pub fn is_interior_branch(&self) -> bool {
        matches!(self.branch, TauBranch::Interior(_))
    }

    pub fn eval(&self, eps: f64, delta: f64) -> Result<ExtReal> {
        if !(eps >= 0.0 && delta >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "eps and delta must be nonnegative, got {eps} and {delta}"
            )));
        }
        Ok(match &self.branch {
            TauBranch::Interior(v) => ExtReal::new(*v),
            TauBranch::Cells(cells) => ExtReal::min_of(
                cells
                    .iter()
                    .filter(|c| c.reachable(eps, delta))
                    .map(|c| c.hull_dist),
            ),
        })
    }
}

fn cell_profile(
    f: &PolyhedralFunction,
    d: &ActiveSet,
    x: &[f64],
    cfg: &Settings,
) -> Result<CellProfile> {
    let hull_dist = gradient_hull_distance(f, d, cfg)?;
    let piece = &f.pieces()[d.indices[0]];
    let a = &piece.gradient;
    let cell = f.cell(d)?;
    let lines = lineality_space(&cell, cfg);
    let a_scale = norm(a).max(1.0);
    let a_perp = lines.iter().all(|l| dot(a, l).abs() <= 1e-12 * a_scale);
    // Slice through x orthogonal to the lines: a pointed polyhedron carrying every
    // value of f on the cell.
    let mut slice: Polyhedron = cell;
    for l in &lines {
        slice.push_equality(l.clone(), dot(l, x));
    }
    let rays = recession_box_vertices(&slice, cfg)
        .into_iter()
        .map(|r| (dot(a, &r), norm(&r)))
        .filter(|(_, rn)| *rn > 1e-12)
        .collect();
    let vertices = vertices_uncapped(&slice, cfg)
        .into_iter()
        .map(|v| (piece.value(&v), dist(&v, x)))
        .collect();
    Ok(CellProfile {
        hull_dist,
        line_escape_any_eps: !lines.is_empty() && !a_perp,
        has_lines: !lines.is_empty(),
        rays,
        vertices,
    })
}

/// `tau(f, x, eps, delta)`: the boundary distance of `∂f(x)` when 0 is interior to it,
/// otherwise the least `d(0, ∂f(u))` over `f(u) >= -eps |u - x| - delta`.
pub fn tau(f: &PolyhedralFunction, q: &TauQuery, cfg: &Settings) -> Result<ExtReal> {
    TauProfile::new(f, &q.x, cfg)?.eval(q.eps, q.delta)
}

/// All moduli at once; local fields need `f(x̄) = 0`.
pub fn full_report(
    f: &PolyhedralFunction,
    xbar: Option<&[f64]>,
    cfg: &Settings,
) -> Result<SlopeReport> {
    let (er_local, boundary_local) = match xbar {
        Some(x) => (
            Some(local_error_bound_modulus(f, x, cfg)?),
            Some(boundary_slope_local(f, x, cfg)?),
        ),
        None => (None, None),
    };
    let outer_global = global_outer_slope(f, cfg)?;
    Ok(SlopeReport {
        er_local,
        strict_outer_local: er_local,
        boundary_local,
        er_global: outer_global,
        outer_global,
        boundary_global: global_boundary_slope(f, cfg)?,
        anchor: xbar.map(|x| x.to_vec()),
    })
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

    fn abs() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[-1.0], 0.0)]).unwrap()
    }

    fn cfg() -> Settings {
        Settings::default()
    }

    #[test]
    fn dee_families() {
        let c = cfg();
        assert_eq!(
            dee_family(&e13(), &[1.0], &c).unwrap(),
            vec![ActiveSet::new(vec![0])]
        );
        assert_eq!(
            dee_family(&max0x(), &[0.0], &c).unwrap(),
            vec![ActiveSet::new(vec![1])]
        );
        assert!(dee_family(&zero(), &[3.0], &c).unwrap().is_empty());
    }

    #[test]
    fn local_moduli() {
        let c = cfg();
        assert_eq!(
            local_error_bound_modulus(&max0x(), &[0.0], &c)
                .unwrap()
                .value(),
            1.0
        );
        assert_eq!(
            local_error_bound_modulus(&e13(), &[1.0], &c)
                .unwrap()
                .value(),
            2.0
        );
        assert!(local_error_bound_modulus(&zero(), &[0.0], &c)
            .unwrap()
            .is_infinite());
        assert!(matches!(
            local_error_bound_modulus(&e13(), &[1.5], &c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn local_boundary_slopes() {
        let c = cfg();
        assert_eq!(
            boundary_slope_local(&max0x(), &[0.0], &c).unwrap().value(),
            0.0
        );
        assert_eq!(
            boundary_slope_local(&e13(), &[1.0], &c).unwrap().value(),
            1.0
        );
        assert_eq!(
            boundary_slope_local(&e13(), &[2.5], &c).unwrap().value(),
            2.0
        );
        assert_eq!(
            boundary_slope_local(&abs(), &[0.0], &c).unwrap().value(),
            1.0
        );
        assert_eq!(
            boundary_slope_local(&zero(), &[0.0], &c).unwrap().value(),
            0.0
        );
    }

    #[test]
    fn global_slopes() {
        let c = cfg();
        assert_eq!(global_outer_slope(&e13(), &c).unwrap().value(), 2.0);
        assert_eq!(global_outer_slope(&max_x_neg1(), &c).unwrap().value(), 1.0);
        assert!(global_outer_slope(&zero(), &c).unwrap().is_infinite());
        assert_eq!(global_boundary_slope(&e13(), &c).unwrap().value(), 1.0);
        assert_eq!(
            global_boundary_slope(&max_x_neg1(), &c).unwrap().value(),
            1.0
        );
        assert_eq!(global_boundary_slope(&zero(), &c).unwrap().value(), 0.0);
    }

    #[test]
    fn tau_on_e13() {
        let c = cfg();
        let p = TauProfile::new(&e13(), &[1.0], &c).unwrap();
        assert!(!p.is_interior_branch());
        for (e, d) in [(0.3, 0.5), (0.0, 0.9), (0.9, 0.0), (0.0, 0.0)] {
            assert_eq!(p.eval(e, d).unwrap().value(), 1.0, "eps={e} delta={d}");
        }
        for (e, d) in [(0.5, 0.5), (1.0, 0.0), (0.0, 1.0), (0.5, 0.6)] {
            assert_eq!(p.eval(e, d).unwrap().value(), 0.0, "eps={e} delta={d}");
        }
    }

    #[test]
    fn tau_on_max_x_neg1() {
        let c = cfg();
        let p = TauProfile::new(&max_x_neg1(), &[0.0], &c).unwrap();
        for d in [0.0, 0.5, 0.99] {
            assert_eq!(p.eval(0.0, d).unwrap().value(), 1.0);
        }
        assert_eq!(p.eval(0.0, 1.0).unwrap().value(), 0.0);
        assert_eq!(p.eval(0.1, 0.0).unwrap().value(), 0.0);
        assert_eq!(p.eval(0.5, 0.0).unwrap().value(), 0.0);
    }

    #[test]
    fn tau_interior_branch() {
        let c = cfg();
        let p = TauProfile::new(&abs(), &[0.0], &c).unwrap();
        assert!(p.is_interior_branch());
        assert_eq!(p.eval(5.0, 5.0).unwrap().value(), 1.0);
    }

    #[test]
    fn tau_errors() {
        let c = cfg();
        let f4 = PolyhedralFunction::from_rows(4, &[(&[1.0, 0.0, 0.0, 0.0], 0.0)]).unwrap();
        let q = TauQuery {
            x: vec![0.0; 4],
            eps: 0.0,
            delta: 0.0,
        };
        assert!(matches!(tau(&f4, &q, &c), Err(Error::Unsupported(_))));
        let q = TauQuery {
            x: vec![1.5],
            eps: 0.0,
            delta: 0.0,
        };
        assert!(matches!(tau(&e13(), &q, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn full_reports() {
        let c = cfg();
        let r = full_report(&e13(), Some(&[1.0]), &c).unwrap();
        assert_eq!(r.er_local.unwrap().value(), 2.0);
        assert_eq!(r.boundary_local.unwrap().value(), 1.0);
        assert_eq!(r.er_global.value(), 2.0);
        assert_eq!(r.boundary_global.value(), 1.0);
        assert!(r.has_global_error_bound());
        let r = full_report(&zero(), Some(&[0.0]), &c).unwrap();
        assert!(r.er_local.unwrap().is_infinite());
        assert_eq!(r.boundary_local.unwrap().value(), 0.0);
        assert!(r.outer_global.is_infinite());
        assert_eq!(r.boundary_global.value(), 0.0);
        let r = full_report(&max0x(), Some(&[0.0]), &c).unwrap();
        assert_eq!(r.er_local.unwrap().value(), 1.0);
        assert_eq!(r.boundary_local.unwrap().value(), 0.0);
    }

    #[test]
    fn ext_real_display() {
        assert_eq!(ExtReal::INFINITY.to_string(), "inf");
        assert_eq!(ExtReal::new(2.0).to_string(), "2");
        assert_eq!(
            serde_json::to_string(&ExtReal::INFINITY).unwrap(),
            "\"inf\""
        );
    }
}
