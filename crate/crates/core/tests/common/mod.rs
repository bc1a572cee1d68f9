//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use ebound::{AffinePiece, PolyhedralFunction, Polytope};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// `m` pieces in `R^n` with `f(x̄) = 0`: the first `k` pieces vanish at `x̄`, the others
/// sit strictly below. Coefficients stay in `[-5, 5]`.
pub fn anchored(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (PolyhedralFunction, Vec<f64>) {
    let xbar = uniform(rng, n, -0.3, 0.3);
    let k = rng.gen_range(1..=m.min(n + 1));
    let pieces = (0..m)
        .map(|i| {
            let a = uniform(rng, n, -5.0, 5.0);
            let v = if i < k { 0.0 } else { -rng.gen_range(0.1..2.0) };
            let b = a.iter().zip(&xbar).map(|(p, q)| p * q).sum::<f64>() - v;
            AffinePiece::new(a, b)
        })
        .collect();
    (PolyhedralFunction::new(n, pieces).unwrap(), xbar)
}

/// Gradients and offsets uniform in `[-5, 5]`; `None` when `f` has no zero.
pub fn free(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Option<PolyhedralFunction> {
    let pieces = (0..m)
        .map(|_| AffinePiece::new(uniform(rng, n, -5.0, 5.0), rng.gen_range(-5.0..5.0)))
        .collect();
    let f = PolyhedralFunction::new(n, pieces).unwrap();
    let cfg = ebound::Settings::default();
    if f.sublevel_polyhedron().is_empty(&cfg).unwrap() {
        return None;
    }
    Some(f)
}

/// The 200-instance suite: dimensions 1 and 2, at most 6 pieces, alternating
/// anchored and free instances.
pub fn suite(rng: &mut ChaCha8Rng, count: usize) -> Vec<PolyhedralFunction> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = 1 + out.len() % 2;
        let m = rng.gen_range(1..=6);
        if out.len() % 4 < 2 {
            out.push(anchored(rng, n, m).0);
        } else if let Some(f) = free(rng, n, m) {
            out.push(f);
        }
    }
    out
}

pub fn polytope(rng: &mut ChaCha8Rng) -> Polytope {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=8);
    let shift = uniform(rng, n, -3.0, 3.0);
    let gens = (0..m)
        .map(|_| {
            uniform(rng, n, -2.0, 2.0)
                .iter()
                .zip(&shift)
                .map(|(a, b)| a + b)
                .collect()
        })
        .collect();
    Polytope::new(n, gens).unwrap()
}
