//! Dense vector helpers and rank-revealing decompositions for small systems.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|x| x * t).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs(rows: &[Vec<f64>]) -> f64 {
    rows.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Orthonormal bases of the row space and of its orthogonal complement.
#[derive(Debug, Clone)]
pub struct RowSpace {
    pub range: Vec<Vec<f64>>,
    pub null: Vec<Vec<f64>>,
}

/// Splits R^n into the span of `rows` and its complement. Singular values at or
/// below `rel_tol * max(1, max|entry|)` count as zero.
pub fn row_space(rows: &[Vec<f64>], n: usize, rel_tol: f64) -> RowSpace {
    if n == 0 {
        return RowSpace {
            range: vec![],
            null: vec![],
        };
    }
    let m = rows.len().max(n);
    let mut mat = DMatrix::<f64>::zeros(m, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            mat[(i, j)] = *v;
        }
    }
    let thresh = rel_tol * max_abs(rows).max(1.0);
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut range = Vec::new();
    let mut null = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        let v: Vec<f64> = v_t.row(k).iter().copied().collect();
        if *s > thresh {
            range.push(v);
        } else {
            null.push(v);
        }
    }
    RowSpace { range, null }
}

/// Affine hull of a point set: an origin, an orthonormal basis of the direction
/// space and an orthonormal basis of its complement.
#[derive(Debug, Clone)]
pub struct AffineHull {
    pub origin: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub complement: Vec<Vec<f64>>,
}

impl AffineHull {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `p - origin` in `basis`.
    pub fn coords(&self, p: &[f64]) -> Vec<f64> {
        let d = sub(p, &self.origin);
        self.basis.iter().map(|b| dot(b, &d)).collect()
    }

    pub fn lift_direction(&self, c: &[f64]) -> Vec<f64> {
        let n = self.origin.len();
        let mut out = vec![0.0; n];
        for (ci, b) in c.iter().zip(&self.basis) {
            for j in 0..n {
                out[j] += ci * b[j];
            }
        }
        out
    }
}

pub fn affine_hull(points: &[Vec<f64>], rel_tol: f64) -> AffineHull {
    let origin = points[0].clone();
    let n = origin.len();
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &origin)).collect();
    let rs = row_space(&diffs, n, rel_tol);
    AffineHull {
        origin,
        basis: rs.range,
        complement: rs.null,
    }
}

/// Minimum-norm solution of `E x = e` together with the residual norm.
pub fn min_norm_solution(e_rows: &[Vec<f64>], rhs: &[f64], n: usize) -> (Vec<f64>, f64) {
    if e_rows.is_empty() {
        return (vec![0.0; n], 0.0);
    }
    let m = e_rows.len();
    let mut mat = DMatrix::<f64>::zeros(m, n);
    for (i, r) in e_rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            mat[(i, j)] = *v;
        }
    }
    let b = DVector::from_column_slice(rhs);
    let scale = max_abs(e_rows).max(1.0);
    let svd = mat.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-11 * scale)
        .unwrap_or_else(|_| DVector::zeros(n));
    let res = (&mat * &x - &b).norm();
    (x.iter().copied().collect(), res)
}

/// Solves the square system `a x = b`; `None` when numerically singular.
pub fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let k = b.len();
    if k == 0 {
        return Some(vec![]);
    }
    let mut mat = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            mat[(i, j)] = a[i][j];
        }
    }
    let scale = max_abs(a).max(1e-300);
    let svd = mat.clone().svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if smin <= 1e-11 * scale {
        return None;
    }
    let lu = mat.lu();
    let x = lu.solve(&DVector::from_column_slice(b))?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}

/// Symmetric positive-definite inverse via Cholesky; `None` when not positive definite.
pub fn spd_inverse(g: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = g.len();
    let mut mat = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            mat[(i, j)] = g[i][j];
        }
    }
    let scale = max_abs(g).max(1e-300);
    let svd = mat.clone().svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if smin <= 1e-10 * scale {
        return None;
    }
    let inv = mat.cholesky()?.inverse();
    Some(
        (0..k)
            .map(|i| (0..k).map(|j| inv[(i, j)]).collect())
            .collect(),
    )
}

/// Lexicographic k-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        idx: if k <= n { Some((0..k).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    idx: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.idx.clone()?;
        let k = cur.len();
        let mut nxt = cur.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.idx = None;
                break;
            }
            i -= 1;
            if nxt[i] < self.n - k + i {
                nxt[i] += 1;
                for j in i + 1..k {
                    nxt[j] = nxt[j - 1] + 1;
                }
                self.idx = Some(nxt);
                break;
            }
        }
        Some(cur)
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerate_in_order() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            combinations(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(binomial(24, 6), 134_596);
    }

    #[test]
    fn affine_hull_of_segment_in_plane() {
        let h = affine_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.0]], 1e-12);
        assert_eq!(h.dim(), 1);
        assert_eq!(h.complement.len(), 1);
        assert!(h.complement[0][0].abs() < 1e-12);
    }

    #[test]
    fn min_norm_solution_of_dependent_rows() {
        let (x, res) = min_norm_solution(&[vec![1.0, 1.0], vec![2.0, 2.0]], &[2.0, 4.0], 2);
        assert!(res < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        let (_, res) = min_norm_solution(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[0.0, 1.0], 2);
        assert!(res > 0.1);
    }
}
