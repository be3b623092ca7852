//! Radiation and directivity patterns of the linear and third-order parts of
//! the transmitted signal over a uniform linear array.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::steering_phases;
use crate::error::{Error, Result};
use crate::precoder::Precoder;

pub const DEFAULT_PATTERN_POINTS: usize = 2048;

/// Directivity values below this are clamped, including exact nulls.
pub const PATTERN_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSample {
    pub theta_tilde_rad: f64,
    pub linear_power: f64,
    pub distortion_power: f64,
    pub directivity_linear_db: f64,
    pub directivity_distortion_db: f64,
}

/// `n` equally spaced angles covering `[-π, π]` inclusive.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Linear and third-order radiated power towards `theta_tilde_rad`.
///
/// The linear part is `p |Σ w_m e^{-jφ̃_m}|²`; the distortion part is
/// `|a3|² E|s|⁶ |Σ w_m |w_m|² e^{-jφ̃_m}|²` with `E|s|⁶ = 6p³` for Gaussian
/// symbols.
pub fn pattern_point(
    precoder: &Precoder,
    a3: Complex64,
    p: f64,
    spacing_over_lambda: f64,
    theta_tilde_rad: f64,
) -> (f64, f64) {
    let phases = steering_phases(precoder.len(), theta_tilde_rad, spacing_over_lambda);
    let (mut lin, mut dist) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (w, phi) in precoder.w.iter().zip(phases) {
        let e = Complex64::from_polar(1.0, -phi);
        lin += w * e;
        dist += w * w.norm_sqr() * e;
    }
    let s6 = 6.0 * p * p * p;
    (p * lin.norm_sqr(), a3.norm_sqr() * s6 * dist.norm_sqr())
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn directivity_db(power: f64, total: f64) -> f64 {
    if total <= 0.0 || power <= 0.0 {
        return PATTERN_FLOOR_DB;
    }
    (10.0 * (power * 2.0 * PI / total).log10()).max(PATTERN_FLOOR_DB)
}

/// Evaluates the pattern on `theta_grid` and normalizes each part by its own
/// total power (trapezoidal rule over the grid) relative to an isotropic
/// radiator.
pub fn radiation_pattern(
    precoder: &Precoder,
    a3: Complex64,
    p: f64,
    spacing_over_lambda: f64,
    theta_grid: &[f64],
) -> Result<Vec<PatternSample>> {
    if theta_grid.len() < 2 {
        return Err(Error::param("pattern grid needs at least two angles"));
    }
    if theta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("pattern grid must be strictly increasing"));
    }
    let eps = 1e-12;
    if theta_grid[0] < -PI - eps || theta_grid[theta_grid.len() - 1] > PI + eps {
        return Err(Error::param("pattern grid must lie in [-pi, pi]"));
    }
    if !(spacing_over_lambda > 0.0) {
        return Err(Error::param("antenna spacing must be positive"));
    }

    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .map(|&t| pattern_point(precoder, a3, p, spacing_over_lambda, t))
        .collect();
    let lin: Vec<f64> = points.iter().map(|p| p.0).collect();
    let dist: Vec<f64> = points.iter().map(|p| p.1).collect();
    let total_lin = trapezoid(theta_grid, &lin);
    let total_dist = trapezoid(theta_grid, &dist);

    Ok(theta_grid
        .iter()
        .zip(points)
        .map(|(&theta, (l, d))| PatternSample {
            theta_tilde_rad: theta,
            linear_power: l,
            distortion_power: d,
            directivity_linear_db: directivity_db(l, total_lin),
            directivity_distortion_db: directivity_db(d, total_dist),
        })
        .collect())
}
