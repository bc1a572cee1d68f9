//! H-represented polyhedra: projection, vertices, recession directions.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    binomial, combinations, dist, dot, min_norm_solution, norm, row_space, scale, solve_square,
    spd_inverse,
};
use crate::settings::Settings;

use super::lp::{maximize, strict_lp_feasible, MixedSystem, RowKind};

/// `<normal, x> <= bound`
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub bound: f64,
}

/// `<normal, x> = value`
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub value: f64,
}

/// Intersection of finitely many closed halfspaces and hyperplanes. May be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
    pub equalities: Vec<Hyperplane>,
}

impl Polyhedron {
    /// All of R^dim.
    pub fn whole_space(dim: usize) -> Self {
        Polyhedron {
            dim,
            halfspaces: vec![],
            equalities: vec![],
        }
    }

    pub fn push_halfspace(&mut self, normal: Vec<f64>, bound: f64) {
        debug_assert_eq!(normal.len(), self.dim);
        self.halfspaces.push(Halfspace { normal, bound });
    }

    pub fn push_equality(&mut self, normal: Vec<f64>, value: f64) {
        debug_assert_eq!(normal.len(), self.dim);
        self.equalities.push(Hyperplane { normal, value });
    }

    pub fn with_halfspace(mut self, normal: &[f64], bound: f64) -> Self {
        self.push_halfspace(normal.to_vec(), bound);
        self
    }

    pub fn with_equality(mut self, normal: &[f64], value: f64) -> Self {
        self.push_equality(normal.to_vec(), value);
        self
    }

    pub fn row_count(&self) -> usize {
        self.halfspaces.len() + self.equalities.len()
    }

    /// Membership up to `tol` (scaled by `1 + |rhs|`).
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.normal, x) <= h.bound + tol * (1.0 + h.bound.abs()))
            && self
                .equalities
                .iter()
                .all(|h| (dot(&h.normal, x) - h.value).abs() <= tol * (1.0 + h.value.abs()))
    }

    pub fn feasible_point(&self, cfg: &Settings) -> Result<Option<Vec<f64>>> {
        let sys = MixedSystem::from_polyhedron(self, &[]);
        Ok(strict_lp_feasible(&sys, cfg)?.witness)
    }

    pub fn is_empty(&self, cfg: &Settings) -> Result<bool> {
        Ok(self.feasible_point(cfg)?.is_none())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())
    }
}

/// The polyhedron rewritten in coordinates of its equality subspace:
/// `x = origin + sum_j z_j basis_j` with `{z : <c_i, z> <= d_i}`.
#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    pub origin: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub rows: Vec<(Vec<f64>, f64)>,
    /// Detected inconsistency while reducing (inconsistent equalities or a violated
    /// constant row).
    pub inconsistent: bool,
}

impl Reduced {
    pub fn new(q: &Polyhedron, cfg: &Settings) -> Self {
        let n = q.dim;
        let e_rows: Vec<Vec<f64>> = q.equalities.iter().map(|h| h.normal.clone()).collect();
        let e_rhs: Vec<f64> = q.equalities.iter().map(|h| h.value).collect();
        let (origin, res) = min_norm_solution(&e_rows, &e_rhs, n);
        let rhs_scale = e_rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let mut inconsistent = res > 1e-9 * rhs_scale.max(1.0);
        let basis: Vec<Vec<f64>> = if e_rows.is_empty() {
            (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    e
                })
                .collect()
        } else {
            row_space(&e_rows, n, 1e-11).null
        };
        let mut rows = Vec::new();
        for h in &q.halfspaces {
            let c: Vec<f64> = basis.iter().map(|b| dot(&h.normal, b)).collect();
            let d = h.bound - dot(&h.normal, &origin);
            let cn = norm(&c);
            if cn <= 1e-12 * norm(&h.normal).max(1.0) {
                if d < -cfg.tol_feas * (1.0 + h.bound.abs()) {
                    inconsistent = true;
                }
                continue;
            }
            rows.push((c, d));
        }
        Reduced {
            origin,
            basis,
            rows,
            inconsistent,
        }
    }

    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn lift(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (zj, b) in z.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += zj * bi;
            }
        }
        x
    }

    pub fn lift_direction(&self, z: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.origin.len()];
        for (zj, b) in z.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += zj * bi;
            }
        }
        x
    }

    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.basis.iter().map(|b| dot(b, &d)).collect()
    }

    fn row_ok(&self, i: usize, z: &[f64], tol: f64) -> bool {
        let (c, d) = &self.rows[i];
        dot(c, z) <= d + tol * (1.0 + d.abs())
    }

    fn feasible(&self, z: &[f64], tol: f64) -> bool {
        (0..self.rows.len()).all(|i| self.row_ok(i, z, tol))
    }
}

/// Euclidean projection result. `point` is `None` (and `dist` is `+inf`) for an empty
/// polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Option<Vec<f64>>,
    pub dist: f64,
}

struct ActiveCandidate {
    rows: Vec<usize>,
    ginv: Vec<Vec<f64>>,
}

/// Projection onto a fixed polyhedron, with the KKT systems of every candidate active
/// set prepared up front when there are not too many of them.
pub struct Projector {
    reduced: Reduced,
    nonempty: bool,
    prepared: Option<Vec<ActiveCandidate>>,
    tol: f64,
}

const PREPARE_LIMIT: u128 = 20_000;

impl Projector {
    pub fn new(q: &Polyhedron, cfg: &Settings) -> Result<Self> {
        if q.row_count() > cfg.max_rows {
            return Err(Error::Unsupported(format!(
                "projection enumerates active sets over at most {} rows, got {}",
                cfg.max_rows,
                q.row_count()
            )));
        }
        let reduced = Reduced::new(q, cfg);
        let nonempty = !reduced.inconsistent && !q.is_empty(cfg)?;
        let k = reduced.k();
        let r = reduced.rows.len();
        let total: u128 = (1..=k.min(r)).map(|s| binomial(r, s)).sum();
        let prepared = if nonempty && total <= PREPARE_LIMIT {
            let mut out = Vec::new();
            for s in 1..=k.min(r) {
                for rows in combinations(r, s) {
                    if let Some(ginv) = gram_inverse(&reduced, &rows) {
                        out.push(ActiveCandidate { rows, ginv });
                    }
                }
            }
            Some(out)
        } else {
            None
        };
        Ok(Projector {
            reduced,
            nonempty,
            prepared,
            tol: cfg.tol_feas.max(1e-12),
        })
    }

    pub fn is_empty(&self) -> bool {
        !self.nonempty
    }

    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        if !self.nonempty {
            return Ok(Projection {
                point: None,
                dist: f64::INFINITY,
            });
        }
        check_dim(self.reduced.origin.len(), x.len())?;
        let t = self.reduced.coords(x);
        let z = if self.reduced.feasible(&t, self.tol) {
            t
        } else {
            self.solve_kkt(&t)?
        };
        let p = self.reduced.lift(&z);
        let d = dist(&p, x);
        Ok(Projection {
            point: Some(p),
            dist: d,
        })
    }

    fn solve_kkt(&self, t: &[f64]) -> Result<Vec<f64>> {
        let mut fallback: Option<(f64, Vec<f64>)> = None;
        let mut try_candidate = |rows: &[usize], ginv: &[Vec<f64>]| -> Option<Vec<f64>> {
            let resid: Vec<f64> = rows
                .iter()
                .map(|&i| dot(&self.reduced.rows[i].0, t) - self.reduced.rows[i].1)
                .collect();
            let mu: Vec<f64> = ginv.iter().map(|g| dot(g, &resid)).collect();
            let mut z = t.to_vec();
            for (m, &i) in mu.iter().zip(rows) {
                for (zj, cj) in z.iter_mut().zip(&self.reduced.rows[i].0) {
                    *zj -= m * cj;
                }
            }
            let mu_scale = mu.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            if mu.iter().all(|m| *m >= -1e-10 * mu_scale) && self.reduced.feasible(&z, self.tol) {
                return Some(z);
            }
            if self.reduced.feasible(&z, 1e-6) {
                let d = dist(&z, t);
                if fallback.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    fallback = Some((d, z));
                }
            }
            None
        };
        match &self.prepared {
            Some(cands) => {
                for c in cands {
                    if let Some(z) = try_candidate(&c.rows, &c.ginv) {
                        return Ok(z);
                    }
                }
            }
            None => {
                let k = self.reduced.k();
                let r = self.reduced.rows.len();
                for s in 1..=k.min(r) {
                    for rows in combinations(r, s) {
                        if let Some(ginv) = gram_inverse(&self.reduced, &rows) {
                            if let Some(z) = try_candidate(&rows, &ginv) {
                                return Ok(z);
                            }
                        }
                    }
                }
            }
        }
        fallback
            .map(|(_, z)| z)
            .ok_or_else(|| Error::Computational {
                message: "no active set satisfied the projection optimality conditions".into(),
                best: None,
            })
    }
}

fn gram_inverse(reduced: &Reduced, rows: &[usize]) -> Option<Vec<Vec<f64>>> {
    let g: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            rows.iter()
                .map(|&j| dot(&reduced.rows[i].0, &reduced.rows[j].0))
                .collect()
        })
        .collect();
    spd_inverse(&g)
}

/// Euclidean projection of `x` onto `q`; `dist = +inf` when `q` is empty.
pub fn project_onto_polyhedron(q: &Polyhedron, x: &[f64], cfg: &Settings) -> Result<Projection> {
    q.check(x)?;
    Projector::new(q, cfg)?.project(x)
}

/// Vertices of a z-space system `{z : <c_i, z> <= d_i}`.
fn reduced_vertices(k: usize, rows: &[(Vec<f64>, f64)], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    if k == 0 {
        return vec![vec![]];
    }
    for subset in combinations(rows.len(), k) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&i| rows[i].1).collect();
        let Some(z) = solve_square(&a, &b) else {
            continue;
        };
        if !rows
            .iter()
            .all(|(c, d)| dot(c, &z) <= d + tol * (1.0 + d.abs()))
        {
            continue;
        }
        let zs = norm(&z).max(1.0);
        if out.iter().any(|v| dist(v, &z) <= 1e-9 * zs) {
            continue;
        }
        out.push(z);
    }
    out
}

pub(crate) fn vertices_uncapped(q: &Polyhedron, cfg: &Settings) -> Vec<Vec<f64>> {
    let red = Reduced::new(q, cfg);
    if red.inconsistent {
        return vec![];
    }
    reduced_vertices(red.k(), &red.rows, cfg.tol_feas.max(1e-12))
        .iter()
        .map(|z| red.lift(z))
        .collect()
}

/// Vertices of `q` by brute force over row subsets. A polyhedron containing a line
/// has no vertices and yields an empty list.
pub fn vertex_enumeration(q: &Polyhedron, cfg: &Settings) -> Result<Vec<Vec<f64>>> {
    if q.row_count() > cfg.max_rows {
        return Err(Error::Unsupported(format!(
            "vertex enumeration over at most {} rows, got {}",
            cfg.max_rows,
            q.row_count()
        )));
    }
    Ok(vertices_uncapped(q, cfg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recession {
    pub unbounded: bool,
    /// Unit direction in the recession cone.
    pub direction: Option<Vec<f64>>,
}

/// Decides whether the recession cone `{r : <a, r> <= 0, <e, r> = 0}` is nontrivial,
/// by maximizing each coordinate (both signs) over the cone cut by the unit box.
pub fn recession_nontrivial(q: &Polyhedron, cfg: &Settings) -> Result<Recession> {
    let red = Reduced::new(q, cfg);
    let k = red.k();
    let mut sys = MixedSystem::new(k);
    for (c, _) in &red.rows {
        sys.push(c.clone(), RowKind::Le, 0.0);
    }
    for j in 0..k {
        for sign in [1.0, -1.0] {
            let mut obj = vec![0.0; k];
            obj[j] = sign;
            if let Some((val, r)) = maximize(&sys, &obj, (-1.0, 1.0))? {
                if val > 1e-9 {
                    let d = red.lift_direction(&r);
                    let nd = norm(&d);
                    return Ok(Recession {
                        unbounded: true,
                        direction: Some(scale(&d, 1.0 / nd)),
                    });
                }
            }
        }
    }
    Ok(Recession {
        unbounded: false,
        direction: None,
    })
}

/// Orthonormal basis of the lineality space `{r : <a, r> = 0, <e, r> = 0}`.
pub fn lineality_space(q: &Polyhedron, cfg: &Settings) -> Vec<Vec<f64>> {
    let red = Reduced::new(q, cfg);
    let cs: Vec<Vec<f64>> = red.rows.iter().map(|(c, _)| c.clone()).collect();
    let k = red.k();
    if k == 0 {
        return vec![];
    }
    let null = if cs.is_empty() {
        (0..k)
            .map(|j| {
                let mut e = vec![0.0; k];
                e[j] = 1.0;
                e
            })
            .collect()
    } else {
        row_space(&cs, k, 1e-11).null
    };
    null.iter().map(|z| red.lift_direction(z)).collect()
}

/// Vertices of the recession cone cut by the unit box in the equality subspace. Every
/// nonzero recession direction is a positive multiple of a point in their convex hull.
pub(crate) fn recession_box_vertices(q: &Polyhedron, cfg: &Settings) -> Vec<Vec<f64>> {
    let red = Reduced::new(q, cfg);
    let k = red.k();
    let mut rows: Vec<(Vec<f64>, f64)> = red.rows.iter().map(|(c, _)| (c.clone(), 0.0)).collect();
    for j in 0..k {
        let mut e = vec![0.0; k];
        e[j] = 1.0;
        rows.push((e.clone(), 1.0));
        e[j] = -1.0;
        rows.push((e, 1.0));
    }
    reduced_vertices(k, &rows, 1e-12)
        .iter()
        .map(|z| red.lift_direction(z))
        .collect()
}
