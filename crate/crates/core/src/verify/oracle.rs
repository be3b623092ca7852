//! Brute-force maximizer of the real-gain problem for small arrays.
//!
//! The null constraint fixes `g_0 = -(Σ_{m≥1} (r_m/r_0) g_m³)^{1/3}` (real
//! cube root) and the objective `(Σ r_m g_m)² / Σ g_m²` is scale invariant, so
//! the grid runs over directions of `(g_1, …, g_{M-1})` in hyperspherical
//! angles. Grid cells that beat their neighbours are then refined by
//! coordinate ascent.
//!
//! When `g_0` is small the map from the free gains to `g_0` is very steep and
//! the maximum sits on a thin curved ridge. Refinement therefore eliminates
//! the antenna with the largest `r_k |g_k|³` instead, which describes the same
//! feasible set with a well-conditioned chart.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Unit-power real gains with a positive array gain.
    pub best_g: Vec<f64>,
    /// `(Σ r_m g_m)²`.
    pub best_array_gain: f64,
    pub grid_points_evaluated: usize,
}

const MAX_SEEDS: usize = 32;
const MAX_SWEEPS: usize = 100_000;
const MIN_STEP: f64 = 1e-14;

/// Full gain vector with antenna `k` solved from the null constraint and the
/// other antennas taken from `free` in order.
fn complete_at(r: &[f64], k: usize, free: &[f64]) -> Vec<f64> {
    let mut g = Vec::with_capacity(r.len());
    g.extend_from_slice(&free[..k]);
    g.push(0.0);
    g.extend_from_slice(&free[k..]);
    let cubic: f64 = r.iter().zip(&g).map(|(r, g)| r * g * g * g).sum();
    g[k] = -(cubic / r[k]).cbrt();
    g
}

/// Full gain vector `[g_0, g_1, …]` for free gains `tail = (g_1, …)`.
pub(crate) fn complete_real(r: &[f64], tail: &[f64]) -> Vec<f64> {
    complete_at(r, 0, tail)
}

pub(crate) fn real_objective(r: &[f64], g: &[f64]) -> f64 {
    let gain: f64 = r.iter().zip(g).map(|(r, g)| r * g).sum();
    let power: f64 = g.iter().map(|g| g * g).sum();
    gain * gain / power
}

/// Unit vector in `R^{n+1}` from `n` hyperspherical angles.
fn direction(angles: &[f64], out: &mut [f64]) {
    let mut sin_prod = 1.0;
    for (i, a) in angles.iter().enumerate() {
        out[i] = sin_prod * a.cos();
        sin_prod *= a.sin();
    }
    out[angles.len()] = sin_prod;
}

/// Inverse of [`direction`] for a nonzero vector.
fn angles_of(u: &[f64]) -> Vec<f64> {
    let n = u.len() - 1;
    let mut angles = Vec::with_capacity(n);
    for i in 0..n {
        if i + 1 == n {
            angles.push(u[n].atan2(u[n - 1]));
        } else {
            let rest = u[i + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
            angles.push(rest.atan2(u[i]));
        }
    }
    angles
}

fn chart_objective(r: &[f64], k: usize, angles: &[f64]) -> f64 {
    let mut free = vec![0.0; r.len() - 1];
    direction(angles, &mut free);
    real_objective(r, &complete_at(r, k, &free))
}

/// Grid point `flat` decoded to angles. The last angle spans `[0, π)` since
/// the objective is even; the others span `[0, π]`.
fn grid_angles(flat: usize, n_angles: usize, grid_n: usize, out: &mut [f64]) {
    let mut rest = flat;
    for i in (0..n_angles).rev() {
        let k = rest % grid_n;
        rest /= grid_n;
        out[i] = if i + 1 == n_angles {
            PI * k as f64 / grid_n as f64
        } else {
            PI * k as f64 / (grid_n - 1) as f64
        };
    }
}

fn is_axis_max(r: &[f64], angles: &mut [f64], f: f64, step: f64) -> bool {
    for i in 0..angles.len() {
        let old = angles[i];
        for d in [step, -step] {
            angles[i] = old + d;
            if chart_objective(r, 0, angles) > f {
                angles[i] = old;
                return false;
            }
        }
        angles[i] = old;
    }
    true
}

/// Coordinate ascent with an adaptive step: doubled (up to `step`) after a
/// successful sweep, halved after a failed one.
fn ascend(r: &[f64], k: usize, angles: &mut [f64], step: f64) -> f64 {
    let max_step = step;
    let mut step = step;
    let mut best = chart_objective(r, k, angles);
    let mut sweeps = 0;
    while step > MIN_STEP && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut improved = false;
        for i in 0..angles.len() {
            for dir in [1.0, -1.0] {
                let old = angles[i];
                angles[i] = old + dir * step;
                let f = chart_objective(r, k, angles);
                if f > best * (1.0 + 4.0 * f64::EPSILON) {
                    best = f;
                    improved = true;
                } else {
                    angles[i] = old;
                }
            }
        }
        step = if improved { (2.0 * step).min(max_step) } else { 0.5 * step };
    }
    best
}

/// Refines a grid seed; returns the full gain vector and its objective.
fn refine(r: &[f64], seed: &[f64], step: f64) -> (Vec<f64>, f64) {
    let mut angles = seed.to_vec();
    ascend(r, 0, &mut angles, step);
    let mut free = vec![0.0; r.len() - 1];
    direction(&angles, &mut free);
    let mut g = complete_real(r, &free);

    // Switch to the best-conditioned chart and continue; repeat while the
    // dominant antenna changes.
    let mut last_k = usize::MAX;
    for _ in 0..r.len() {
        let k = (0..r.len())
            .max_by(|&a, &b| (r[a] * g[a].abs().powi(3)).total_cmp(&(r[b] * g[b].abs().powi(3))))
            .unwrap_or(0);
        if k == last_k {
            break;
        }
        last_k = k;
        let free: Vec<f64> = g.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, x)| *x).collect();
        let mut angles = angles_of(&free);
        ascend(r, k, &mut angles, step);
        let mut free = vec![0.0; r.len() - 1];
        direction(&angles, &mut free);
        g = complete_at(r, k, &free);
    }
    let f = real_objective(r, &g);
    (g, f)
}

pub fn brute_force_real(r: &[f64], grid_n: usize) -> Result<OracleResult> {
    let m = r.len();
    if !(3..=5).contains(&m) {
        return Err(Error::param(format!("brute force supports 3 <= M <= 5, got {m}")));
    }
    if !(64..=512).contains(&grid_n) {
        return Err(Error::param(format!("grid_n must be in [64, 512], got {grid_n}")));
    }
    if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::param("channel gains must be positive"));
    }

    let n_angles = m - 2;
    let total = grid_n.pow(n_angles as u32);
    let spacing = PI / (grid_n - 1) as f64;
    let block = grid_n.pow(n_angles as u32 - 1);

    // Cells that beat their axis neighbours seed the refinement.
    let mut seeds: Vec<(usize, f64)> = (0..grid_n)
        .into_par_iter()
        .map(|b| {
            let mut angles = vec![0.0; n_angles];
            let mut found = Vec::new();
            for flat in b * block..(b + 1) * block {
                grid_angles(flat, n_angles, grid_n, &mut angles);
                let f = chart_objective(r, 0, &angles);
                if is_axis_max(r, &mut angles, f, spacing) {
                    found.push((flat, f));
                }
            }
            found
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    seeds.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    seeds.truncate(MAX_SEEDS);

    // Ordered reduction: the earliest seed wins ties.
    let (mut g, _) = seeds
        .par_iter()
        .map(|&(flat, _)| {
            let mut angles = vec![0.0; n_angles];
            grid_angles(flat, n_angles, grid_n, &mut angles);
            refine(r, &angles, spacing)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((Vec::new(), f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });

    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let gain: f64 = r.iter().zip(&g).map(|(r, g)| r * g).sum();
    let sign = if gain < 0.0 { -1.0 } else { 1.0 };
    for x in &mut g {
        *x *= sign / norm;
    }
    let gain: f64 = r.iter().zip(&g).map(|(r, g)| r * g).sum();
    Ok(OracleResult { best_g: g, best_array_gain: gain * gain, grid_points_evaluated: total })
}
