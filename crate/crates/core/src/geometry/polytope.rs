//! Polytopes given as convex hulls of finitely many generators.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{affine_hull, combinations, dist, dot, norm, row_space, sub, AffineHull};
use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "polytope needs at least one generator".into(),
            ));
        }
        for g in &generators {
            check_dim(dim, g.len())?;
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite generator entry".into()));
            }
        }
        Ok(Polytope { dim, generators })
    }

    /// Interval `[lo, hi]` on the real line.
    pub fn interval(lo: f64, hi: f64) -> Self {
        Polytope {
            dim: 1,
            generators: vec![vec![lo], vec![hi]],
        }
    }

    fn translated(&self, q: &[f64]) -> Vec<Vec<f64>> {
        self.generators.iter().map(|g| sub(g, q)).collect()
    }

    pub fn hull(&self) -> AffineHull {
        affine_hull(&self.generators, 1e-10)
    }

    /// Affine dimension of the hull.
    pub fn affine_dim(&self) -> usize {
        self.hull().dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim
    }

    pub fn contains(&self, q: &[f64], cfg: &Settings) -> Result<bool> {
        Ok(distance_to_polytope(self, q, cfg)? <= cfg.tol_geo)
    }

    /// `q` lies in the interior taken in the whole space: the hull is full-dimensional
    /// and every facet inequality holds with margin above `tol_feas`.
    pub fn interior_contains(&self, q: &[f64], cfg: &Settings) -> Result<bool> {
        check_dim(self.dim, q.len())?;
        if !self.is_full_dimensional() {
            return Ok(false);
        }
        let facets = facet_enumeration(self, cfg)?;
        Ok(facets
            .facets
            .iter()
            .all(|fc| dot(&fc.normal, q) < fc.offset - cfg.tol_feas))
    }

    pub fn nearest_point(&self, q: &[f64], cfg: &Settings) -> Result<Vec<f64>> {
        check_dim(self.dim, q.len())?;
        let m = min_norm_point(
            &Polytope {
                dim: self.dim,
                generators: self.translated(q),
            },
            cfg,
        )?;
        Ok(m.point.iter().zip(q).map(|(p, x)| p + x).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormPoint {
    pub point: Vec<f64>,
    pub dist: f64,
    /// Convex weights over the generators (same order) reproducing `point`.
    pub weights: Vec<f64>,
}

/// Wolfe's minimum-norm-point method over `conv(generators)`.
pub fn min_norm_point(p: &Polytope, cfg: &Settings) -> Result<MinNormPoint> {
    let pts = &p.generators;
    let m = pts.len();
    let n = p.dim;
    let scale = pts.iter().map(|g| dot(g, g)).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        let mut weights = vec![0.0; m];
        weights[0] = 1.0;
        return Ok(MinNormPoint {
            point: vec![0.0; n],
            dist: 0.0,
            weights,
        });
    }
    let gap_tol = cfg.tol_geo * 1e-3 * scale.max(1.0);
    let cap = (10 * m * n).max(10);

    let start = (0..m)
        .min_by(|&i, &j| dot(&pts[i], &pts[i]).total_cmp(&dot(&pts[j], &pts[j])))
        .expect("nonempty");
    let mut support = vec![start];
    let mut lambda = vec![1.0];
    let mut x = pts[start].clone();

    let combine = |support: &[usize], w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&i, wi) in support.iter().zip(w) {
            for (o, v) in out.iter_mut().zip(&pts[i]) {
                *o += wi * v;
            }
        }
        out
    };

    let mut converged = false;
    for _ in 0..cap {
        let xx = dot(&x, &x);
        if xx <= 1e-30 * scale {
            // origin reached up to roundoff
            x.iter_mut().for_each(|v| *v = 0.0);
            converged = true;
            break;
        }
        let (j, best) = (0..m)
            .map(|j| (j, dot(&x, &pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - best <= gap_tol || support.contains(&j) {
            converged = true;
            break;
        }
        support.push(j);
        lambda.push(0.0);

        // minor cycle
        loop {
            let alpha = affine_minimizer(pts, &support);
            if alpha.iter().all(|a| *a > 1e-15) {
                lambda = alpha;
                x = combine(&support, &lambda);
                break;
            }
            let mut theta = 1.0_f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= 1e-15 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep_s = Vec::new();
            let mut keep_l = Vec::new();
            for (&s, &l) in support.iter().zip(&lambda) {
                if l > 1e-15 {
                    keep_s.push(s);
                    keep_l.push(l);
                }
            }
            if keep_s.is_empty() {
                // numerically collapsed; restart from the best vertex touched
                keep_s.push(j);
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            support = keep_s;
            lambda = keep_l.iter().map(|l| l / total).collect();
            x = combine(&support, &lambda);
            if support.len() == 1 {
                break;
            }
        }
    }
    if !converged {
        return Err(Error::Computational {
            message: format!("minimum-norm point did not converge within {cap} iterations"),
            best: Some(x),
        });
    }
    let mut weights = vec![0.0; m];
    for (&s, &l) in support.iter().zip(&lambda) {
        weights[s] += l;
    }
    let d = norm(&x);
    Ok(MinNormPoint {
        point: x,
        dist: d,
        weights,
    })
}

/// Weights (summing to one) of the point of least norm in the affine hull of the
/// selected generators.
fn affine_minimizer(pts: &[Vec<f64>], support: &[usize]) -> Vec<f64> {
    let k = support.len();
    let mut mat = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            mat[(a, b)] = dot(&pts[i], &pts[j]);
        }
        mat[(a, k)] = 1.0;
        mat[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let scale = mat.amax().max(1.0);
    let sol = mat
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()) && (&mat * s - &rhs).amax() < 1e-9 * scale)
        .or_else(|| mat.svd(true, true).solve(&rhs, 1e-13 * scale).ok())
        .unwrap_or_else(|| {
            let mut e = DVector::zeros(k + 1);
            e[0] = 1.0;
            e
        });
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    let total: f64 = alpha.iter().sum();
    if total.abs() > 1e-12 {
        alpha.iter().map(|a| a / total).collect()
    } else {
        alpha
    }
}

pub fn distance_to_polytope(p: &Polytope, q: &[f64], cfg: &Settings) -> Result<f64> {
    check_dim(p.dim, q.len())?;
    Ok(min_norm_point(
        &Polytope {
            dim: p.dim,
            generators: p.translated(q),
        },
        cfg,
    )?
    .dist)
}

/// One facet: `<normal, x> <= offset` holds on the polytope with equality on the
/// listed generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertex_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetList {
    pub facets: Vec<Facet>,
}

/// Facets relative to the affine hull, by brute force over generator subsets. Normals
/// are unit vectors lying in the hull's direction space.
pub fn facet_enumeration(p: &Polytope, cfg: &Settings) -> Result<FacetList> {
    if p.generators.len() > cfg.max_generators {
        return Err(Error::Unsupported(format!(
            "facet enumeration handles at most {} generators, got {}",
            cfg.max_generators,
            p.generators.len()
        )));
    }
    let hull = p.hull();
    let r = hull.dim();
    if r == 0 {
        return Err(Error::Precondition(
            "facet enumeration needs a polytope of positive dimension".into(),
        ));
    }
    let coords: Vec<Vec<f64>> = p.generators.iter().map(|g| hull.coords(g)).collect();
    let spread = coords.iter().map(|c| norm(c)).fold(1.0_f64, f64::max);
    let tol = cfg.tol_feas.max(1e-12) * spread;
    let mut facets: Vec<Facet> = Vec::new();
    for subset in combinations(coords.len(), r) {
        let base = &coords[subset[0]];
        let diffs: Vec<Vec<f64>> = subset[1..].iter().map(|&i| sub(&coords[i], base)).collect();
        let null = row_space(&diffs, r, 1e-10).null;
        if null.len() != 1 {
            continue;
        }
        for sign in [1.0, -1.0] {
            let c: Vec<f64> = null[0].iter().map(|v| sign * v).collect();
            let off = dot(&c, base);
            if coords.iter().any(|g| dot(&c, g) > off + tol) {
                continue;
            }
            let on: Vec<usize> = (0..coords.len())
                .filter(|&i| dot(&c, &coords[i]) >= off - tol)
                .collect();
            if facets.iter().any(|f| f.vertex_indices == on) {
                continue;
            }
            let normal = hull.lift_direction(&c);
            let offset = dot(&normal, &p.generators[subset[0]]);
            facets.push(Facet {
                normal,
                offset,
                vertex_indices: on,
            });
        }
    }
    if facets.len() < r + 1 {
        return Err(Error::computational(format!(
            "facet enumeration found {} facets for a {r}-dimensional polytope",
            facets.len()
        )));
    }
    Ok(FacetList { facets })
}

/// Nearest point of the boundary (in the whole space), its distance, and an outward
/// direction leaving the polytope from that point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec<f64>,
    pub dist: f64,
    /// Unit outward normal of the lowest-index facet through `point`, or a unit vector
    /// orthogonal to the affine hull when the polytope is lower-dimensional.
    pub outward: Vec<f64>,
}

/// `d(q, bd P)` with the boundary taken in R^n.
pub fn boundary_distance(p: &Polytope, q: &[f64], cfg: &Settings) -> Result<f64> {
    Ok(boundary_nearest(p, q, cfg)?.dist)
}

pub fn boundary_nearest(p: &Polytope, q: &[f64], cfg: &Settings) -> Result<BoundaryPoint> {
    check_dim(p.dim, q.len())?;
    let hull = p.hull();
    if hull.dim() < p.dim {
        let point = p.nearest_point(q, cfg)?;
        let outward = hull.complement[0].clone();
        return Ok(BoundaryPoint {
            dist: dist(&point, q),
            point,
            outward,
        });
    }
    let facets = facet_enumeration(p, cfg)?;
    let point_facet = |point: &[f64]| -> Vec<f64> {
        facets
            .facets
            .iter()
            .min_by(|a, b| {
                let ga = a.offset - dot(&a.normal, point);
                let gb = b.offset - dot(&b.normal, point);
                ga.total_cmp(&gb)
            })
            .map(|f| f.normal.clone())
            .expect("full-dimensional polytope has facets")
    };
    let outside = distance_to_polytope(p, q, cfg)?;
    if outside > cfg.tol_geo {
        let point = p.nearest_point(q, cfg)?;
        let outward =
            lowest_facet_through(&facets, &point, cfg).unwrap_or_else(|| point_facet(&point));
        return Ok(BoundaryPoint {
            point,
            dist: outside,
            outward,
        });
    }
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for (k, fc) in facets.facets.iter().enumerate() {
        let sub_p = Polytope {
            dim: p.dim,
            generators: fc
                .vertex_indices
                .iter()
                .map(|&i| p.generators[i].clone())
                .collect(),
        };
        let point = sub_p.nearest_point(q, cfg)?;
        let d = dist(&point, q);
        if best.as_ref().is_none_or(|(bd, _, _)| d < *bd - 1e-15) {
            best = Some((d, point, k));
        }
    }
    let (d, point, k) = best.expect("facets nonempty");
    let outward = lowest_facet_through(&facets, &point, cfg)
        .unwrap_or_else(|| facets.facets[k].normal.clone());
    Ok(BoundaryPoint {
        point,
        dist: d,
        outward,
    })
}

fn lowest_facet_through(facets: &FacetList, point: &[f64], cfg: &Settings) -> Option<Vec<f64>> {
    let tol = cfg.tol_geo.max(1e-12) * (1.0 + norm(point)) * 10.0;
    facets
        .facets
        .iter()
        .find(|f| (dot(&f.normal, point) - f.offset).abs() <= tol)
        .map(|f| f.normal.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Settings {
        Settings::default()
    }

    fn poly(gens: &[&[f64]]) -> Polytope {
        Polytope::new(gens[0].len(), gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn min_norm_of_negative_interval() {
        let m = min_norm_point(&Polytope::interval(-2.0, -1.0), &cfg()).unwrap();
        assert_eq!(m.point, vec![-1.0]);
        assert_eq!(m.dist, 1.0);
    }

    #[test]
    fn min_norm_of_diagonal_segment() {
        let m = min_norm_point(&poly(&[&[1.0, 0.0], &[0.0, 1.0]]), &cfg()).unwrap();
        assert!((m.point[0] - 0.5).abs() < 1e-12 && (m.point[1] - 0.5).abs() < 1e-12);
        assert!((m.dist - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!((m.weights[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn min_norm_zero_when_origin_inside() {
        let p = poly(&[&[1.0, 1.0], &[-1.0, 1.0], &[0.0, -2.0]]);
        assert!(min_norm_point(&p, &cfg()).unwrap().dist < 1e-12);
    }

    #[test]
    fn distances() {
        let c = cfg();
        assert_eq!(
            distance_to_polytope(&Polytope::interval(1.0, 2.5), &[0.5], &c).unwrap(),
            0.5
        );
        assert_eq!(
            distance_to_polytope(&Polytope::interval(1.0, 2.5), &[2.0], &c).unwrap(),
            0.0
        );
        assert_eq!(
            distance_to_polytope(&poly(&[&[2.0, 0.0]]), &[0.0, 0.0], &c).unwrap(),
            2.0
        );
    }

    #[test]
    fn membership_and_interior() {
        let c = cfg();
        let p = Polytope::interval(-1.0, 2.0);
        assert!(p.contains(&[0.0], &c).unwrap() && p.interior_contains(&[0.0], &c).unwrap());
        let p = Polytope::interval(0.0, 1.0);
        assert!(p.contains(&[0.0], &c).unwrap() && !p.interior_contains(&[0.0], &c).unwrap());
        let seg = poly(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(seg.contains(&[0.5, 0.0], &c).unwrap());
        assert!(!seg.interior_contains(&[0.5, 0.0], &c).unwrap());
    }

    #[test]
    fn facets_of_square_segment_triangle() {
        let c = cfg();
        let sq = poly(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        let f = facet_enumeration(&sq, &c).unwrap();
        assert_eq!(f.facets.len(), 4);
        for fc in &f.facets {
            assert!((fc.offset - 1.0).abs() < 1e-12);
            assert!((norm(&fc.normal) - 1.0).abs() < 1e-12);
            assert!(fc.normal.iter().filter(|v| v.abs() > 1e-12).count() == 1);
        }
        let seg = facet_enumeration(&Polytope::interval(-2.0, -1.0), &c).unwrap();
        assert_eq!(seg.facets.len(), 2);
        let tri = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(facet_enumeration(&tri, &c).unwrap().facets.len(), 3);
    }

    #[test]
    fn facets_ignore_interior_generators() {
        let c = cfg();
        let p = poly(&[
            &[0.0, 0.0],
            &[2.0, 0.0],
            &[0.0, 2.0],
            &[0.5, 0.5],
            &[1.0, 0.0],
        ]);
        let f = facet_enumeration(&p, &c).unwrap();
        assert_eq!(f.facets.len(), 3);
        let bottom = f.facets.iter().find(|fc| fc.normal[1] < -0.5).unwrap();
        assert_eq!(bottom.vertex_indices, vec![0, 1, 4]);
    }

    #[test]
    fn boundary_distances() {
        let c = cfg();
        assert_eq!(
            boundary_distance(&Polytope::interval(0.0, 1.0), &[0.0], &c).unwrap(),
            0.0
        );
        assert_eq!(
            boundary_distance(&Polytope::interval(-2.0, -1.0), &[0.0], &c).unwrap(),
            1.0
        );
        let sq = poly(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        assert!((boundary_distance(&sq, &[0.0, 0.0], &c).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            boundary_distance(&Polytope::interval(-1.0, 1.0), &[0.0], &c).unwrap(),
            1.0
        );
    }

    #[test]
    fn outward_directions() {
        let c = cfg();
        let b = boundary_nearest(&Polytope::interval(0.0, 1.0), &[0.0], &c).unwrap();
        assert_eq!(b.outward, vec![-1.0]);
        let b = boundary_nearest(&Polytope::interval(-2.0, -1.0), &[0.0], &c).unwrap();
        assert_eq!(b.point, vec![-1.0]);
        assert_eq!(b.outward, vec![1.0]);
        let seg = poly(&[&[0.0, 1.0], &[1.0, 1.0]]);
        let b = boundary_nearest(&seg, &[0.0, 0.0], &c).unwrap();
        assert!((b.outward[0]).abs() < 1e-12 && (b.outward[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_many_generators() {
        let c = Settings {
            max_generators: 2,
            ..Settings::default()
        };
        let p = poly(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            facet_enumeration(&p, &c),
            Err(Error::Unsupported(_))
        ));
    }
}
