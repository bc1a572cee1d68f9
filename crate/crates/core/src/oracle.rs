//! Independent estimators used to cross-check the exact computations.
//!
//! The error bound moduli are estimated straight from their ratio definitions
//! `f(x) / d(x, S_f)`, sampling around a point (shrinking balls) or over the whole
//! space (expanding boxes). Sampling is sharded: shard `k` draws from a ChaCha stream
//! `k` of the configured seed, and shard minima are combined with `min`, so estimates
//! are bit-identical for any thread count.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{min_norm_point, Polyhedron, Polytope, Projector};
use crate::linalg::{binomial, combinations, dist, dot, min_norm_solution, norm};
use crate::polyfun::{ActiveSet, PolyhedralFunction};
use crate::settings::Settings;
use crate::slopes::check_zero;

const SHARD: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    /// Total sample budget, split evenly across levels.
    pub samples: usize,
    /// Radius of the first ball (local) or box (global).
    pub radius: f64,
    /// Number of radii visited: halving for local estimates, doubling for global ones.
    pub shrink_levels: usize,
    /// Active-set enlargement used by the `tau` estimator.
    pub tol: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0x5eed,
            samples: 100_000,
            radius: 1.0,
            shrink_levels: 12,
            tol: 1e-3,
        }
    }
}

/// Per-level sampling statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub radius: f64,
    pub samples: usize,
    /// Samples that landed where they count (`f > 0`, or inside the tau region).
    pub accepted: usize,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub levels: Vec<Level>,
    /// Balls around the running best sample (global estimates only).
    pub refinement: Vec<Level>,
}

impl Estimate {
    pub fn accepted(&self) -> usize {
        self.levels
            .iter()
            .chain(&self.refinement)
            .map(|l| l.accepted)
            .sum()
    }
}

/// Best accepted sample of one shard, tagged with the shard index for tie-breaking.
struct ShardBest {
    accepted: usize,
    min: f64,
    shard: usize,
    arg: Option<Vec<f64>>,
}

impl ShardBest {
    fn merge(a: ShardBest, b: ShardBest) -> ShardBest {
        let accepted = a.accepted + b.accepted;
        let (win, _) = if (b.min, b.shard) < (a.min, a.shard) {
            (b, a)
        } else {
            (a, b)
        };
        ShardBest { accepted, ..win }
    }
}

/// Draws `count` points in fixed shards, scores them and keeps the least score.
/// Stream `(stage << 32) | shard` of `seed` feeds shard `shard`, so the outcome does
/// not depend on how shards are scheduled.
fn sample_stage<D, S>(
    seed: u64,
    stage: usize,
    count: usize,
    draw: D,
    score: S,
) -> (Level, Option<Vec<f64>>)
where
    D: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
    S: Fn(&[f64]) -> Option<f64> + Sync,
{
    let shards = count.div_ceil(SHARD);
    let best = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((stage as u64) << 32) | k as u64);
            let mut out = ShardBest {
                accepted: 0,
                min: f64::INFINITY,
                shard: k,
                arg: None,
            };
            for _ in 0..SHARD.min(count - k * SHARD) {
                let x = draw(&mut rng);
                if let Some(q) = score(&x) {
                    out.accepted += 1;
                    if q < out.min {
                        out.min = q;
                        out.arg = Some(x);
                    }
                }
            }
            out
        })
        .reduce(
            || ShardBest {
                accepted: 0,
                min: f64::INFINITY,
                shard: usize::MAX,
                arg: None,
            },
            ShardBest::merge,
        );
    let level = Level {
        radius: 0.0,
        samples: count,
        accepted: best.accepted,
        min: best.min,
    };
    (level, best.arg)
}

fn uniform_ball(rng: &mut ChaCha8Rng, center: &[f64], r: f64) -> Vec<f64> {
    let n = center.len();
    let g: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let gn = norm(&g).max(1e-300);
    let rad = r * rng.gen::<f64>().powf(1.0 / n as f64);
    center
        .iter()
        .zip(&g)
        .map(|(c, v)| c + rad * v / gn)
        .collect()
}

fn uniform_box(rng: &mut ChaCha8Rng, center: &[f64], r: f64) -> Vec<f64> {
    center
        .iter()
        .map(|c| c + r * (2.0 * rng.gen::<f64>() - 1.0))
        .collect()
}

fn check_config(cfg: &McConfig) -> Result<()> {
    if cfg.samples == 0 || cfg.shrink_levels == 0 || !(cfg.radius.is_finite() && cfg.radius > 0.0) {
        return Err(Error::InvalidInput(
            "samples, levels and radius must be positive".into(),
        ));
    }
    Ok(())
}

/// Ratio `f(x) / d(x, S_f)` over sampled `x` with `f(x) > 0`.
fn ratio_sample(f: &PolyhedralFunction, proj: &Projector, x: &[f64]) -> Option<f64> {
    let v = f.value(x);
    if v <= 0.0 {
        return None;
    }
    let d = proj.project(x).ok()?.dist;
    if d <= 0.0 {
        return None;
    }
    Some(v / d)
}

/// Like [`ratio_sample`], but also scores `x` slid toward its projection `p` until it is
/// `1e-5 (1 + |p|)` away. For convex `f` the ratio never increases along that segment:
/// `d` shrinks by the factor `t` and `f` by at least that factor. Both points are
/// genuine samples, so the smaller ratio is kept.
fn slid_ratio_sample(f: &PolyhedralFunction, proj: &Projector, x: &[f64]) -> Option<f64> {
    let v = f.value(x);
    if v <= 0.0 {
        return None;
    }
    let pr = proj.project(x).ok()?;
    if pr.dist <= 0.0 {
        return None;
    }
    let direct = v / pr.dist;
    let p = pr.point?;
    let h = 1e-5 * (1.0 + norm(&p));
    if pr.dist <= h {
        return Some(direct);
    }
    let t = h / pr.dist;
    let xt: Vec<f64> = p.iter().zip(x).map(|(a, b)| a + t * (b - a)).collect();
    Some(ratio_sample(f, proj, &xt).map_or(direct, |q| q.min(direct)))
}

/// Liminf of `f(x) / d(x, S_f)` as `x -> x̄` with `f(x) > 0`, estimated by minima over
/// balls of radius `radius * 2^-l`. The reported value is the last level's minimum.
pub fn estimate_er_local(
    f: &PolyhedralFunction,
    xbar: &[f64],
    mc: &McConfig,
    cfg: &Settings,
) -> Result<Estimate> {
    check_zero(f, xbar, cfg)?;
    check_config(mc)?;
    let count = (mc.samples / mc.shrink_levels).max(1);
    let proj = Projector::new(&f.sublevel_polyhedron(), cfg)?;
    let mut levels = Vec::with_capacity(mc.shrink_levels);
    for l in 0..mc.shrink_levels {
        let r = mc.radius * 0.5_f64.powi(l as i32);
        let (level, _) = sample_stage(
            mc.seed,
            l,
            count,
            |rng| uniform_ball(rng, xbar, r),
            |x| ratio_sample(f, &proj, x),
        );
        levels.push(Level { radius: r, ..level });
    }
    let value = levels.last().map_or(f64::INFINITY, |l| l.min);
    Ok(Estimate {
        value,
        levels,
        refinement: Vec::new(),
    })
}

/// `inf_{f(x) > 0} f(x) / d(x, S_f)`. Half the budget goes to boxes of half-width
/// `radius * 2^l` centred at the point of `S_f` nearest the origin; the other half to
/// balls of radius `radius * 2^-l` around the best sample so far. Every sample is also
/// scored next to the solution set (see [`slid_ratio_sample`]), which reaches minima
/// that live on thin ridges. Reports the minimum over every sample.
pub fn estimate_er_global(
    f: &PolyhedralFunction,
    mc: &McConfig,
    cfg: &Settings,
) -> Result<Estimate> {
    check_config(mc)?;
    let count = (mc.samples / (2 * mc.shrink_levels)).max(1);
    let proj = Projector::new(&f.sublevel_polyhedron(), cfg)?;
    if proj.is_empty() {
        return Err(Error::Precondition("the solution set of f is empty".into()));
    }
    let center = proj
        .project(&vec![0.0; f.dim()])?
        .point
        .expect("nonempty solution set");
    let score = |x: &[f64]| slid_ratio_sample(f, &proj, x);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let keep = |best: &mut Option<(f64, Vec<f64>)>, level: &Level, arg: Option<Vec<f64>>| {
        if let Some(x) = arg {
            if best.as_ref().is_none_or(|(b, _)| level.min < *b) {
                *best = Some((level.min, x));
            }
        }
    };
    let mut levels = Vec::with_capacity(mc.shrink_levels);
    for l in 0..mc.shrink_levels {
        let r = mc.radius * 2.0_f64.powi(l as i32);
        let (level, arg) =
            sample_stage(mc.seed, l, count, |rng| uniform_box(rng, &center, r), score);
        keep(&mut best, &level, arg);
        levels.push(Level { radius: r, ..level });
    }
    let mut refinement = Vec::with_capacity(mc.shrink_levels);
    for l in 0..mc.shrink_levels {
        let Some((_, at)) = best.clone() else { break };
        let r = mc.radius * 0.5_f64.powi(l as i32);
        let stage = mc.shrink_levels + l;
        let (level, arg) = sample_stage(
            mc.seed,
            stage,
            count,
            |rng| uniform_ball(rng, &at, r),
            score,
        );
        keep(&mut best, &level, arg);
        refinement.push(Level { radius: r, ..level });
    }
    let value = best.map_or(f64::INFINITY, |(v, _)| v);
    Ok(Estimate {
        value,
        levels,
        refinement,
    })
}

/// Least `d(0, ∂f(u))` over sampled `u` with `f(u) >= -eps |u - x| - delta`, the
/// subdifferential taken over pieces within `mc.tol` of the maximum. Boxes of
/// half-width `radius * 2^l` around `x`.
pub fn estimate_tau(
    f: &PolyhedralFunction,
    x: &[f64],
    eps: f64,
    delta: f64,
    mc: &McConfig,
    cfg: &Settings,
) -> Result<Estimate> {
    check_zero(f, x, cfg)?;
    check_config(mc)?;
    let count = (mc.samples / mc.shrink_levels).max(1);
    let cache: Mutex<HashMap<ActiveSet, f64>> = Mutex::new(HashMap::new());
    let score = |u: &[f64]| -> Option<f64> {
        if f.value(u) < -eps * dist(u, x) - delta {
            return None;
        }
        let act = f.active_unchecked(u, mc.tol);
        if let Some(d) = cache.lock().expect("cache lock").get(&act) {
            return Some(*d);
        }
        let d = min_norm_point(&f.gradients_of(&act), cfg)
            .map(|m| m.dist)
            .unwrap_or(f64::INFINITY);
        cache.lock().expect("cache lock").insert(act, d);
        Some(d)
    };
    let mut levels = Vec::with_capacity(mc.shrink_levels);
    for l in 0..mc.shrink_levels {
        let r = mc.radius * 2.0_f64.powi(l as i32);
        let (level, _) = sample_stage(mc.seed, l, count, |rng| uniform_box(rng, x, r), score);
        levels.push(Level { radius: r, ..level });
    }
    let value = levels.iter().map(|l| l.min).fold(f64::INFINITY, f64::min);
    Ok(Estimate {
        value,
        levels,
        refinement: Vec::new(),
    })
}

/// Weight vectors on the simplex with denominator `grid` and `s` entries.
fn simplex_grid(s: usize, grid: usize, mut visit: impl FnMut(&[f64])) {
    let mut counts = vec![0usize; s];
    let mut w = vec![0.0; s];
    fn rec(
        i: usize,
        left: usize,
        grid: usize,
        counts: &mut [usize],
        w: &mut [f64],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        let s = counts.len();
        if i == s - 1 {
            counts[i] = left;
            for (wj, c) in w.iter_mut().zip(counts.iter()) {
                *wj = *c as f64 / grid as f64;
            }
            visit(w);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, grid, counts, w, visit);
        }
    }
    rec(0, grid, grid, &mut counts, &mut w, &mut visit);
}

fn combo_norm(pts: &[&Vec<f64>], w: &[f64]) -> f64 {
    let n = pts[0].len();
    let mut acc = 0.0;
    for j in 0..n {
        let v: f64 = pts.iter().zip(w).map(|(p, wi)| wi * p[j]).sum();
        acc += v * v;
    }
    acc.sqrt()
}

/// Pairwise mass transfers between weights with a shrinking step.
fn refine_weights(pts: &[&Vec<f64>], mut w: Vec<f64>, start: f64) -> f64 {
    let mut best = combo_norm(pts, &w);
    let mut h = start;
    let s = w.len();
    while h > 1e-12 {
        let mut improved = false;
        for i in 0..s {
            for j in 0..s {
                if i == j || w[i] < h {
                    continue;
                }
                w[i] -= h;
                w[j] += h;
                let v = combo_norm(pts, &w);
                if v < best {
                    best = v;
                    improved = true;
                } else {
                    w[i] += h;
                    w[j] -= h;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Brute-force `d(0, P)`: a simplex grid of resolution `grid` on every generator subset
/// of size at most `dim + 1`, then pairwise-transfer refinement of the best grid point
/// on each subset.
pub fn brute_min_norm(p: &Polytope, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::InvalidInput("grid must be positive".into()));
    }
    let m = p.generators.len();
    let smax = (p.dim + 1).min(m);
    let total: u128 = (1..=smax)
        .map(|s| binomial(m, s) * binomial(grid + s - 1, s - 1))
        .sum();
    if total > 2_000_000_000 {
        return Err(Error::Unsupported(format!(
            "brute-force minimum norm would visit {total} grid points"
        )));
    }
    let subsets: Vec<Vec<usize>> = (1..=smax).flat_map(|s| combinations(m, s)).collect();
    Ok(subsets
        .par_iter()
        .map(|sub| {
            let pts: Vec<&Vec<f64>> = sub.iter().map(|&i| &p.generators[i]).collect();
            let mut best = f64::INFINITY;
            let mut arg = vec![0.0; sub.len()];
            simplex_grid(sub.len(), grid, |w| {
                let v = combo_norm(&pts, w);
                if v < best {
                    best = v;
                    arg.copy_from_slice(w);
                }
            });
            best.min(refine_weights(&pts, arg, 0.5 / grid as f64))
        })
        .reduce(|| f64::INFINITY, f64::min))
}

/// Brute-force `d(x, Q)`. A subset search projects `x` onto the affine hull of every
/// set of at most `dim` inequality rows (taken as equations, with the equalities of
/// `q`) and keeps the nearest feasible image; no multipliers are consulted. A regular
/// grid with `grid` points per axis is then refined on halving boxes around the best
/// point, so the estimate only decreases. `+inf` when `q` is empty.
pub fn brute_projection(q: &Polyhedron, x: &[f64], grid: usize) -> Result<f64> {
    check_dim(q.dim, x.len())?;
    if grid < 2 {
        return Err(Error::InvalidInput(
            "grid must have at least 2 points per axis".into(),
        ));
    }
    let n = q.dim;
    let pts = (grid as u128).pow(n as u32);
    if pts > 5_000_000 {
        return Err(Error::Unsupported(format!(
            "grid of {pts} points is too large"
        )));
    }
    let scale = q
        .halfspaces
        .iter()
        .map(|h| h.bound.abs())
        .chain(q.equalities.iter().map(|e| e.value.abs()))
        .chain(x.iter().map(|v| v.abs()))
        .fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let feasible = |u: &[f64]| q.contains(u, 1e-12);
    if feasible(x) {
        return Ok(0.0);
    }
    let scan = |center: &[f64], r: f64| -> Option<(f64, Vec<f64>)> {
        let mut idx = vec![0usize; n];
        let mut best: Option<(f64, Vec<f64>)> = None;
        loop {
            let u: Vec<f64> = (0..n)
                .map(|j| center[j] - r + 2.0 * r * idx[j] as f64 / (grid - 1) as f64)
                .collect();
            if feasible(&u) {
                let d = dist(&u, x);
                if best.as_ref().is_none_or(|(b, _)| d < *b) {
                    best = Some((d, u));
                }
            }
            let mut j = 0;
            loop {
                if j == n {
                    return best;
                }
                idx[j] += 1;
                if idx[j] < grid {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    };

    let m = q.halfspaces.len();
    let subsets: u128 = (0..=n.min(m)).map(|k| binomial(m, k)).sum();
    if subsets > 5_000_000 {
        return Err(Error::Unsupported(format!(
            "{subsets} row subsets are too many"
        )));
    }
    let Some((mut best, mut at)) = subset_projection(q, x, tol) else {
        return Ok(f64::INFINITY);
    };
    let mut r = best;
    for _ in 0..200 {
        r *= 0.5;
        if r < 1e-12 * (1.0 + best) {
            break;
        }
        if let Some((d, u)) = scan(&at, r) {
            if d < best {
                best = d;
                at = u;
            }
        }
    }
    Ok(best)
}

fn subset_projection(q: &Polyhedron, x: &[f64], tol: f64) -> Option<(f64, Vec<f64>)> {
    let n = q.dim;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..=n.min(q.halfspaces.len()) {
        for rows in combinations(q.halfspaces.len(), k) {
            let mut normals: Vec<Vec<f64>> =
                q.equalities.iter().map(|e| e.normal.clone()).collect();
            let mut gaps: Vec<f64> = q
                .equalities
                .iter()
                .map(|e| e.value - dot(&e.normal, x))
                .collect();
            for &i in &rows {
                let h = &q.halfspaces[i];
                normals.push(h.normal.clone());
                gaps.push(h.bound - dot(&h.normal, x));
            }
            let (shift, res) = min_norm_solution(&normals, &gaps, n);
            if res > tol {
                continue;
            }
            let u: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let d = norm(&shift);
            if q.contains(&u, tol) && best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, u));
            }
        }
    }
    best
}
