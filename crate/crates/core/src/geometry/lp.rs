//! Mixed strict / non-strict linear systems, decided by slack maximization.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::linalg::{dot, min_norm_solution, sub};
use crate::settings::Settings;

use super::Polyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `<c, y> = rhs`
    Eq,
    /// `<c, y> <= rhs`
    Le,
    /// `<c, y> < rhs`
    Lt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub kind: RowKind,
}

/// A linear system in `dim` free variables mixing equalities, closed and strict
/// inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSystem {
    pub dim: usize,
    pub rows: Vec<LinearRow>,
}

impl MixedSystem {
    pub fn new(dim: usize) -> Self {
        MixedSystem { dim, rows: vec![] }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, kind: RowKind, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.rows.push(LinearRow { coeffs, rhs, kind });
    }

    pub fn eq(mut self, coeffs: &[f64], rhs: f64) -> Self {
        self.push(coeffs.to_vec(), RowKind::Eq, rhs);
        self
    }

    pub fn le(mut self, coeffs: &[f64], rhs: f64) -> Self {
        self.push(coeffs.to_vec(), RowKind::Le, rhs);
        self
    }

    pub fn lt(mut self, coeffs: &[f64], rhs: f64) -> Self {
        self.push(coeffs.to_vec(), RowKind::Lt, rhs);
        self
    }

    /// The polyhedron's rows, with the listed halfspaces made strict.
    pub fn from_polyhedron(q: &Polyhedron, strict: &[usize]) -> Self {
        let mut sys = MixedSystem::new(q.dim);
        for h in &q.equalities {
            sys.push(h.normal.clone(), RowKind::Eq, h.value);
        }
        for (i, h) in q.halfspaces.iter().enumerate() {
            let kind = if strict.contains(&i) {
                RowKind::Lt
            } else {
                RowKind::Le
            };
            sys.push(h.normal.clone(), kind, h.bound);
        }
        sys
    }

    fn has_strict(&self) -> bool {
        self.rows.iter().any(|r| r.kind == RowKind::Lt)
    }

    /// Smallest `rhs - <c, y>` over the strict rows (`+inf` without strict rows).
    pub fn strict_slack(&self, y: &[f64]) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.kind == RowKind::Lt)
            .map(|r| r.rhs - dot(&r.coeffs, y))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrictFeasibility {
    pub feasible: bool,
    /// The system with every strict row relaxed to `<=` is consistent (up to `tol_feas`).
    pub closed_feasible: bool,
    pub witness: Option<Vec<f64>>,
    /// Achieved strict slack at the witness.
    pub slack: f64,
}

/// Decides a mixed strict / non-strict system.
///
/// Strict rows are relaxed to `<c, y> + t <= rhs` and `t` is maximized (capped at 1,
/// which stands in for an unbounded slack). The witness is then pushed back onto the
/// equality rows and the slack is recomputed from it; the system counts as strictly
/// feasible only when that recomputed slack exceeds `tol_feas`.
pub fn strict_lp_feasible(sys: &MixedSystem, cfg: &Settings) -> Result<StrictFeasibility> {
    let strict = sys.has_strict();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..sys.dim)
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let t = strict.then(|| problem.add_var(1.0, (f64::NEG_INFINITY, 1.0)));
    for row in &sys.rows {
        let mut expr: Vec<(minilp::Variable, f64)> = vars
            .iter()
            .zip(&row.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        let op = match row.kind {
            RowKind::Eq => ComparisonOp::Eq,
            RowKind::Le => ComparisonOp::Le,
            RowKind::Lt => {
                expr.push((t.expect("strict slack variable"), 1.0));
                ComparisonOp::Le
            }
        };
        problem.add_constraint(expr.as_slice(), op, row.rhs);
    }
    let solution = match problem.solve() {
        Ok(s) => s,
        Err(minilp::Error::Infeasible) => {
            return Ok(StrictFeasibility {
                feasible: false,
                closed_feasible: false,
                witness: None,
                slack: f64::NEG_INFINITY,
            })
        }
        Err(minilp::Error::Unbounded) => {
            return Err(Error::computational("slack LP reported unbounded"))
        }
    };
    let raw: Vec<f64> = vars.iter().map(|v| solution[*v]).collect();
    let y = polish_onto_equalities(sys, raw);
    let slack = sys.strict_slack(&y);
    let feasible = !strict || slack > cfg.tol_feas;
    let closed_feasible = !strict || slack >= -cfg.tol_feas;
    Ok(StrictFeasibility {
        feasible,
        closed_feasible,
        witness: Some(y),
        slack,
    })
}

/// Least-norm correction of `y` onto the equality rows.
fn polish_onto_equalities(sys: &MixedSystem, y: Vec<f64>) -> Vec<f64> {
    let eq: Vec<&LinearRow> = sys.rows.iter().filter(|r| r.kind == RowKind::Eq).collect();
    if eq.is_empty() {
        return y;
    }
    let rows: Vec<Vec<f64>> = eq.iter().map(|r| r.coeffs.clone()).collect();
    let resid: Vec<f64> = eq.iter().map(|r| dot(&r.coeffs, &y) - r.rhs).collect();
    let (delta, res) = min_norm_solution(&rows, &resid, sys.dim);
    if !res.is_finite() || delta.iter().any(|v| !v.is_finite()) {
        return y;
    }
    sub(&y, &delta)
}

/// Maximizes `<obj, y>` subject to the closed rows of `sys` (strict rows are read as
/// `<=`) and optional box bounds on every variable. `Ok(None)` when infeasible.
pub(crate) fn maximize(
    sys: &MixedSystem,
    obj: &[f64],
    bounds: (f64, f64),
) -> Result<Option<(f64, Vec<f64>)>> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = obj.iter().map(|c| problem.add_var(*c, bounds)).collect();
    for row in &sys.rows {
        let expr: Vec<(minilp::Variable, f64)> = vars
            .iter()
            .zip(&row.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        let op = match row.kind {
            RowKind::Eq => ComparisonOp::Eq,
            RowKind::Le | RowKind::Lt => ComparisonOp::Le,
        };
        problem.add_constraint(expr.as_slice(), op, row.rhs);
    }
    match problem.solve() {
        Ok(s) => {
            let y: Vec<f64> = vars.iter().map(|v| s[*v]).collect();
            Ok(Some((dot(obj, &y), y)))
        }
        Err(minilp::Error::Infeasible) => Ok(None),
        Err(minilp::Error::Unbounded) => Err(Error::computational("LP unbounded")),
    }
}
