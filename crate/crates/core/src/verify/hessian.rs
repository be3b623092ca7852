//! Second-order check of critical points through a finite-difference Hessian
//! of the reduced objective.
//!
//! Antenna 0 is eliminated through the null constraint and the power
//! constraint is absorbed by normalization, leaving
//! `f(g̃_1, …, g̃_{M-1}) = (Σ r_m g̃_m)² / Σ g̃_m²` with
//! `g̃_0 = -(Σ_{m≥1} (r_m/r_0) g̃_m³)^{1/3}`. `f` is scale invariant, so the
//! radial direction always carries a zero eigenvalue.

use nalgebra::{DMatrix, SymmetricEigen};

use super::oracle::{complete_real, real_objective};
use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Constraint tolerance for accepting a critical point.
const CONSTRAINT_TOL: f64 = 1e-8;
const MAX_HALVINGS: i32 = 12;
const RICHARDSON_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct HessianSummary {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
    /// `max |H_ij - H_ji|` before symmetrization.
    pub asymmetry: f64,
    /// Frobenius norm.
    pub norm: f64,
}

impl HessianSummary {
    /// Negative semi-definite up to `rel_tol · |λ_min|`.
    pub fn is_nsd(&self, rel_tol: f64) -> bool {
        self.max_eigenvalue <= rel_tol * self.min_eigenvalue.abs()
    }
}

/// The reduced objective at free gains `(g̃_1, …, g̃_{M-1})`.
pub fn reduced_objective(r: &[f64], tail: &[f64]) -> f64 {
    real_objective(r, &complete_real(r, tail))
}

pub fn hessian_check(r: &[f64], g: &[f64], fd_step: f64) -> Result<HessianSummary> {
    let m = r.len();
    if m < 2 || g.len() != m {
        return Err(Error::param("need matching gain and channel vectors with M >= 2"));
    }
    if r.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::param("channel gains must be positive"));
    }
    if !(fd_step > 0.0) {
        return Err(Error::param("finite-difference step must be positive"));
    }
    let power: f64 = g.iter().map(|x| x * x).sum();
    let cubic: f64 = r.iter().zip(g).map(|(r, g)| r * g * g * g).sum();
    if (power - 1.0).abs() > CONSTRAINT_TOL {
        return Err(Error::InvalidCriticalPoint(format!("power constraint off by {:e}", power - 1.0)));
    }
    if cubic.abs() > CONSTRAINT_TOL {
        return Err(Error::InvalidCriticalPoint(format!("null constraint residual {cubic:e}")));
    }

    let x0 = &g[1..];
    let base: Vec<f64> = x0.iter().map(|x| fd_step * (x.abs() + 1.0)).collect();

    // Richardson extrapolation over halved steps. Eliminating a weak antenna
    // makes the reduced objective stiff, so a single step can be far off.
    let mut prev_h = fd_matrix(r, x0, &base);
    let mut prev_r: Option<DMatrix<f64>> = None;
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for k in 1..=MAX_HALVINGS {
        let scale = 0.5f64.powi(k);
        let steps: Vec<f64> = base.iter().map(|s| s * scale).collect();
        let h = fd_matrix(r, x0, &steps);
        let rich = (&h * 4.0 - &prev_h) / 3.0;
        if let Some(pr) = &prev_r {
            let change = (&rich - pr).norm() / rich.norm().max(f64::MIN_POSITIVE);
            if best.as_ref().is_none_or(|(c, _)| change < *c) {
                best = Some((change, rich.clone()));
            }
            if change < RICHARDSON_TOL {
                break;
            }
        }
        prev_h = h;
        prev_r = Some(rich);
    }
    let h = best.map(|(_, m)| m).unwrap_or(prev_h);

    let n = x0.len();
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asymmetry = asymmetry.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    let sym = (&h + h.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(HessianSummary {
        max_eigenvalue: *eigenvalues.last().unwrap_or(&0.0),
        min_eigenvalue: *eigenvalues.first().unwrap_or(&0.0),
        eigenvalues,
        asymmetry,
        norm: h.norm(),
    })
}

/// Central finite-difference Hessian with per-coordinate steps.
fn fd_matrix(r: &[f64], x0: &[f64], steps: &[f64]) -> DMatrix<f64> {
    let n = x0.len();
    let f0 = reduced_objective(r, x0);
    let mut x = x0.to_vec();
    let mut eval = |shifts: &[(usize, f64)]| {
        x.copy_from_slice(x0);
        for &(i, d) in shifts {
            x[i] += d;
        }
        reduced_objective(r, &x)
    };
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let hi = steps[i];
        let fp = eval(&[(i, hi)]);
        let fm = eval(&[(i, -hi)]);
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in 0..n {
            if i == j {
                continue;
            }
            let hj = steps[j];
            let fpp = eval(&[(i, hi), (j, hj)]);
            let fpm = eval(&[(i, hi), (j, -hj)]);
            let fmp = eval(&[(i, -hi), (j, hj)]);
            let fmm = eval(&[(i, -hi), (j, -hj)]);
            h[(i, j)] = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
        }
    }
    h
}
