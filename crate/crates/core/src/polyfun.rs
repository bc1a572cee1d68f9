//! Finite max-of-affine functions and their combinatorics: active sets,
//! subdifferentials, sublevel sets and the cells on which the active set is constant.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{
    recession_nontrivial, strict_lp_feasible, MixedSystem, Polyhedron, Polytope, RowKind,
};
use crate::linalg::dot;
use crate::settings::Settings;

/// `x -> <gradient, x> - offset`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl AffinePiece {
    pub fn new(gradient: Vec<f64>, offset: f64) -> Self {
        AffinePiece { gradient, offset }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.gradient, x) - self.offset
    }
}

/// `f(x) = max_i (<a_i, x> - b_i)` on R^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralFunction {
    dim: usize,
    pieces: Vec<AffinePiece>,
}

impl PolyhedralFunction {
    /// Validates the pieces and drops exact duplicates (first occurrence kept).
    /// Dominated pieces stay: they can still tie for the maximum.
    pub fn new(dim: usize, pieces: Vec<AffinePiece>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidInput(
                "at least one affine piece is required".into(),
            ));
        }
        let mut kept: Vec<AffinePiece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            check_dim(dim, p.gradient.len())?;
            if !p.offset.is_finite() || p.gradient.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(
                    "piece coefficients must be finite".into(),
                ));
            }
            if !kept.contains(&p) {
                kept.push(p);
            }
        }
        Ok(PolyhedralFunction { dim, pieces: kept })
    }

    /// Shorthand for `new` from `(gradient, offset)` pairs.
    pub fn from_rows(dim: usize, rows: &[(&[f64], f64)]) -> Result<Self> {
        Self::new(
            dim,
            rows.iter()
                .map(|(a, b)| AffinePiece::new(a.to_vec(), *b))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn gradient(&self, i: usize) -> &[f64] {
        &self.pieces[i].gradient
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value(x))
    }

    /// `max(f(x), 0)`
    pub fn f_plus(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.max(0.0))
    }

    /// Unchecked evaluation for hot loops.
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices `i` with `f_i(x) >= f(x) - tol`.
    pub fn active_set(&self, x: &[f64], tol: f64) -> Result<ActiveSet> {
        check_dim(self.dim, x.len())?;
        Ok(self.active_unchecked(x, tol))
    }

    pub(crate) fn active_unchecked(&self, x: &[f64], tol: f64) -> ActiveSet {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.value(x)).collect();
        let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ActiveSet::new(
            vals.iter()
                .enumerate()
                .filter(|(_, v)| **v >= top - tol)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// `conv{a_i : i in D}`
    pub fn gradients_of(&self, d: &ActiveSet) -> Polytope {
        Polytope {
            dim: self.dim,
            generators: d
                .indices
                .iter()
                .map(|&i| self.pieces[i].gradient.clone())
                .collect(),
        }
    }

    /// `∂f(x)` as the hull of the active gradients (active up to `tol_active`).
    pub fn subdifferential(&self, x: &[f64], cfg: &Settings) -> Result<Polytope> {
        let act = self.active_set(x, cfg.tol_active)?;
        Ok(self.gradients_of(&act))
    }

    /// `S_f = {x : f(x) <= 0}` as `<a_i, x> <= b_i` for all pieces.
    pub fn sublevel_polyhedron(&self) -> Polyhedron {
        let mut q = Polyhedron::whole_space(self.dim);
        for p in &self.pieces {
            q.push_halfspace(p.gradient.clone(), p.offset);
        }
        q
    }

    /// Closed region on which every piece of `D` attains the maximum.
    pub fn cell(&self, d: &ActiveSet) -> Result<Polyhedron> {
        self.check_set(d)?;
        let j = d.indices[0];
        let pj = &self.pieces[j];
        let mut q = Polyhedron::whole_space(self.dim);
        for &i in &d.indices[1..] {
            let pi = &self.pieces[i];
            q.push_equality(
                pi.gradient
                    .iter()
                    .zip(&pj.gradient)
                    .map(|(a, b)| a - b)
                    .collect(),
                pi.offset - pj.offset,
            );
        }
        for (k, pk) in self.pieces.iter().enumerate() {
            if d.contains(k) {
                continue;
            }
            q.push_halfspace(
                pk.gradient
                    .iter()
                    .zip(&pj.gradient)
                    .map(|(a, b)| a - b)
                    .collect(),
                pk.offset - pj.offset,
            );
        }
        Ok(q)
    }

    fn check_set(&self, d: &ActiveSet) -> Result<()> {
        if d.indices.is_empty() {
            return Err(Error::InvalidInput("active set must be nonempty".into()));
        }
        if let Some(&bad) = d.indices.iter().find(|&&i| i >= self.pieces.len()) {
            return Err(Error::InvalidInput(format!(
                "piece index {bad} out of range for {} pieces",
                self.pieces.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_caps(&self, cfg: &Settings) -> Result<()> {
        if self.pieces.len() > cfg.max_pieces || self.dim > cfg.max_dim {
            return Err(Error::Unsupported(format!(
                "active-set enumeration is capped at {} pieces in dimension {} (got {} in {})",
                cfg.max_pieces,
                cfg.max_dim,
                self.pieces.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Pattern system in the variables `(x, s)`: pieces of `D` equal `s`, the others
    /// strictly below it, with `s` restricted by `region`.
    fn pattern_system(&self, d: &[usize], region: Region) -> MixedSystem {
        let n = self.dim;
        let mut sys = MixedSystem::new(n + 1);
        for (k, p) in self.pieces.iter().enumerate() {
            let mut c = p.gradient.clone();
            c.push(-1.0);
            let kind = if d.contains(&k) {
                RowKind::Eq
            } else {
                RowKind::Lt
            };
            sys.push(c, kind, p.offset);
        }
        let mut s_row = vec![0.0; n + 1];
        s_row[n] = -1.0;
        match region {
            Region::ZeroLevel => sys.push(s_row, RowKind::Eq, 0.0),
            Region::Positive => sys.push(s_row, RowKind::Lt, 0.0),
            Region::Nonnegative => sys.push(s_row, RowKind::Le, 0.0),
            Region::Anywhere => {}
        }
        sys
    }

    /// Every exact active-set pattern realized somewhere in `region`, sorted by index
    /// set.
    pub fn occurring_active_sets(&self, region: Region, cfg: &Settings) -> Result<Vec<ActiveSet>> {
        Ok(self
            .occurring_patterns(region, cfg)?
            .into_iter()
            .map(|p| p.set)
            .collect())
    }

    /// Like `occurring_active_sets`, with a point realizing each pattern.
    pub fn occurring_patterns(&self, region: Region, cfg: &Settings) -> Result<Vec<Pattern>> {
        self.check_caps(cfg)?;
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.dfs(0, &mut stack, region, cfg, &mut out)?;
        out.sort_by(|a, b| a.set.cmp(&b.set));
        Ok(out)
    }

    fn dfs(
        &self,
        start: usize,
        stack: &mut Vec<usize>,
        region: Region,
        cfg: &Settings,
        out: &mut Vec<Pattern>,
    ) -> Result<()> {
        for i in start..self.pieces.len() {
            stack.push(i);
            let sys = self.pattern_system(stack, region);
            let r = strict_lp_feasible(&sys, cfg)?;
            if r.closed_feasible {
                if r.feasible {
                    let mut w = r.witness.expect("feasible system has a witness");
                    w.truncate(self.dim);
                    out.push(Pattern {
                        set: ActiveSet::new(stack.clone()),
                        point: w,
                    });
                }
                self.dfs(i + 1, stack, region, cfg, out)?;
            }
            stack.pop();
        }
        Ok(())
    }

    /// Cells whose gradient hull contains 0 and which are nonempty; these are the
    /// faces of `argmin f`.
    pub fn argmin_cells(&self, cfg: &Settings) -> Result<Vec<ArgminCell>> {
        let mut out = Vec::new();
        for pat in self.occurring_patterns(Region::Anywhere, cfg)? {
            if !self
                .gradients_of(&pat.set)
                .contains(&vec![0.0; self.dim], cfg)?
            {
                continue;
            }
            let cell = self.cell(&pat.set)?;
            let unbounded = recession_nontrivial(&cell, cfg)?.unbounded;
            out.push(ArgminCell {
                set: pat.set,
                cell,
                unbounded,
            });
        }
        Ok(out)
    }

    /// `f + c`
    pub fn shifted(&self, c: f64) -> Self {
        PolyhedralFunction {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece::new(p.gradient.clone(), p.offset - c))
                .collect(),
        }
    }

    /// `f + <w, . - anchor>`; keeps piece count and order.
    pub fn plus_linear(&self, w: &[f64], anchor: &[f64]) -> Result<Self> {
        check_dim(self.dim, w.len())?;
        check_dim(self.dim, anchor.len())?;
        let wa = dot(w, anchor);
        Ok(PolyhedralFunction {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    AffinePiece::new(
                        p.gradient.iter().zip(w).map(|(a, b)| a + b).collect(),
                        p.offset + wa,
                    )
                })
                .collect(),
        })
    }

    /// `f + p` expanded as the max over all pairwise sums of pieces.
    pub fn plus(&self, p: &PolyhedralFunction) -> Result<Self> {
        check_dim(self.dim, p.dim)?;
        let mut pieces = Vec::with_capacity(self.pieces.len() * p.pieces.len());
        for a in &self.pieces {
            for b in &p.pieces {
                pieces.push(AffinePiece::new(
                    a.gradient
                        .iter()
                        .zip(&b.gradient)
                        .map(|(x, y)| x + y)
                        .collect(),
                    a.offset + b.offset,
                ));
            }
        }
        PolyhedralFunction::new(self.dim, pieces)
    }
}

/// Sorted set of piece indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActiveSet {
    pub indices: Vec<usize>,
}

impl ActiveSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        ActiveSet { indices }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_subset(&self, other: &ActiveSet) -> bool {
        self.indices.iter().all(|i| other.contains(*i))
    }
}

impl fmt::Display for ActiveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Where a pattern must be realized: `f = 0`, `f > 0`, `f >= 0`, or anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    ZeroLevel,
    Positive,
    Nonnegative,
    Anywhere,
}

/// An active-set pattern together with a point where exactly that set is active.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub set: ActiveSet,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArgminCell {
    pub set: ActiveSet,
    pub cell: Polyhedron,
    pub unbounded: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{project_onto_polyhedron, vertex_enumeration};

    fn e13() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)])
            .unwrap()
    }

    fn max0x() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[0.0], 0.0), (&[1.0], 0.0)]).unwrap()
    }

    fn zero() -> PolyhedralFunction {
        PolyhedralFunction::from_rows(1, &[(&[0.0], 0.0)]).unwrap()
    }

    fn set(ix: &[usize]) -> ActiveSet {
        ActiveSet::new(ix.to_vec())
    }

    #[test]
    fn evaluates_e13() {
        let f = e13();
        assert_eq!(f.evaluate(&[0.0]).unwrap(), 2.0);
        assert_eq!(f.evaluate(&[1.0]).unwrap(), 0.0);
        assert_eq!(f.evaluate(&[2.5]).unwrap(), 0.0);
        assert_eq!(f.f_plus(&[2.0]).unwrap(), 0.0);
        assert_eq!(zero().evaluate(&[-3.0]).unwrap(), 0.0);
        assert!(matches!(
            f.evaluate(&[0.0, 1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn active_sets_of_e13() {
        let f = e13();
        assert_eq!(f.active_set(&[1.0], 1e-9).unwrap(), set(&[0, 1]));
        assert_eq!(f.active_set(&[2.0], 1e-9).unwrap(), set(&[1, 2]));
        assert_eq!(f.active_set(&[2.5], 1e-9).unwrap(), set(&[2]));
    }

    #[test]
    fn subdifferentials() {
        let cfg = Settings::default();
        let d = max0x().subdifferential(&[0.0], &cfg).unwrap();
        assert_eq!(d.generators, vec![vec![0.0], vec![1.0]]);
        let d = e13().subdifferential(&[1.0], &cfg).unwrap();
        assert_eq!(d.generators, vec![vec![-2.0], vec![-1.0]]);
        let d = e13().subdifferential(&[2.0], &cfg).unwrap();
        assert!(d.contains(&[0.0], &cfg).unwrap());
    }

    #[test]
    fn duplicate_pieces_are_dropped_dominated_kept() {
        let f = PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[1.0], 0.0), (&[1.0], 3.0)])
            .unwrap();
        assert_eq!(f.num_pieces(), 2);
    }

    #[test]
    fn sublevel_sets() {
        let cfg = Settings::default();
        let v = vertex_enumeration(&e13().sublevel_polyhedron(), &cfg).unwrap();
        let mut xs: Vec<f64> = v.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![1.0, 2.5]);
        assert!(zero().sublevel_polyhedron().contains(&[1e6], 1e-9));
        let g = PolyhedralFunction::from_rows(1, &[(&[1.0], -1.0)]).unwrap();
        let q = g.sublevel_polyhedron();
        assert!(q.contains(&[-1.0], 1e-12) && !q.contains(&[-0.99], 1e-12));
        assert!(recession_nontrivial(&q, &cfg).unwrap().unbounded);
    }

    #[test]
    fn cells_of_e13() {
        let cfg = Settings::default();
        let f = e13();
        let kink = f.cell(&set(&[0, 1])).unwrap();
        let p = project_onto_polyhedron(&kink, &[5.0], &cfg).unwrap();
        assert!((p.point.unwrap()[0] - 1.0).abs() < 1e-12);
        let left = f.cell(&set(&[0])).unwrap();
        assert!(left.contains(&[1.0], 1e-12) && !left.contains(&[1.01], 1e-12));
        assert!(left.contains(&[-100.0], 1e-12));
        assert!(f.cell(&set(&[0, 2])).unwrap().is_empty(&cfg).unwrap());
        assert!(f.cell(&set(&[])).is_err());
        assert!(f.cell(&set(&[3])).is_err());
    }

    #[test]
    fn occurring_sets_of_e13() {
        let cfg = Settings::default();
        let f = e13();
        assert_eq!(
            f.occurring_active_sets(Region::ZeroLevel, &cfg).unwrap(),
            vec![set(&[0, 1]), set(&[2])]
        );
        assert_eq!(
            f.occurring_active_sets(Region::Positive, &cfg).unwrap(),
            vec![set(&[0]), set(&[2])]
        );
        let pats = f.occurring_patterns(Region::ZeroLevel, &cfg).unwrap();
        assert!((pats[0].point[0] - 1.0).abs() < 1e-9);
        assert!((pats[1].point[0] - 2.5).abs() < 1e-9);
        assert!(zero()
            .occurring_active_sets(Region::Positive, &cfg)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn argmin_cells() {
        let cfg = Settings::default();
        let f = PolyhedralFunction::from_rows(1, &[(&[1.0], 0.0), (&[0.0], 1.0)]).unwrap();
        let cells = f.argmin_cells(&cfg).unwrap();
        let unb: Vec<_> = cells.iter().filter(|c| c.unbounded).collect();
        assert_eq!(unb.len(), 1);
        assert_eq!(unb[0].set, set(&[1]));
        assert!(unb[0].cell.contains(&[-1.0], 1e-12) && !unb[0].cell.contains(&[-0.9], 1e-12));

        let cells = e13().argmin_cells(&cfg).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].set, set(&[1, 2]));
        assert!(!cells[0].unbounded);

        let cells = zero().argmin_cells(&cfg).unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].unbounded);
    }

    #[test]
    fn piece_cap() {
        let cfg = Settings {
            max_pieces: 2,
            ..Settings::default()
        };
        assert!(matches!(
            e13().occurring_active_sets(Region::Anywhere, &cfg),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn linear_and_constant_shifts() {
        let f = e13();
        let g = f.plus_linear(&[1.1], &[1.0]).unwrap();
        for x in [-1.0, 0.3, 1.0, 2.2, 4.0] {
            let want = f.value(&[x]) + 1.1 * (x - 1.0);
            assert!((g.value(&[x]) - want).abs() < 1e-12);
        }
        assert_eq!(f.shifted(0.5).value(&[1.0]), 0.5);
        let h = f.plus(&max0x()).unwrap();
        for x in [-1.0, 0.3, 1.0, 2.2, 4.0] {
            let want = f.value(&[x]) + x.max(0.0);
            assert!((h.value(&[x]) - want).abs() < 1e-12);
        }
    }
}
