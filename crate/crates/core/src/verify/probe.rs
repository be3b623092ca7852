//! Exploratory search over complex gains, compared against the best real
//! solution. Informational only: nothing here asserts that real gains are
//! optimal.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::ChannelVector;
use crate::error::Result;
use crate::precoder::theorem1_global;
use crate::rng::RngStream;
use crate::types::ComplexVec;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeReport {
    pub restarts: usize,
    /// Best `|Σ r_m g_m|²` found over complex unit-power null-satisfying `g`.
    pub best_complex_objective: Option<f64>,
    /// Array gain of the best line-search maximum.
    pub best_real_objective: Option<f64>,
    /// `(complex - real) / real`.
    pub relative_gap: Option<f64>,
}

/// `[g_0, g_1, …]` with `g_0` chosen so that `Σ r_m g_m |g_m|² = 0`.
fn complete_complex(r: &[f64], tail: &[Complex64]) -> Vec<Complex64> {
    let c: Complex64 = r[1..].iter().zip(tail).map(|(r, g)| g * (r * g.norm_sqr())).sum();
    let mag = c.norm();
    let g0 = if mag > 0.0 {
        -c / mag * (mag / r[0]).cbrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let mut g = Vec::with_capacity(r.len());
    g.push(g0);
    g.extend_from_slice(tail);
    g
}

fn complex_objective(r: &[f64], coords: &[f64]) -> f64 {
    let tail: Vec<Complex64> = coords.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    let g = complete_complex(r, &tail);
    let gain: Complex64 = r.iter().zip(&g).map(|(r, g)| g * *r).sum();
    let power: f64 = g.iter().map(|g| g.norm_sqr()).sum();
    if power == 0.0 {
        return 0.0;
    }
    gain.norm_sqr() / power
}

fn local_search(r: &[f64], start: Vec<f64>) -> f64 {
    let mut x = start;
    let mut best = complex_objective(r, &x);
    let mut step = 0.25;
    let mut evals = 0;
    while step > 1e-12 && evals < 200_000 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step * (old.abs() + 0.1);
                let f = complex_objective(r, &x);
                evals += 1;
                if f > best {
                    best = f;
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

pub fn conjecture_probe(r: &[f64], n_restarts: usize, rng: RngStream) -> Result<ProbeReport> {
    if n_restarts == 0 {
        return Ok(ProbeReport::default());
    }
    let h = ChannelVector::explicit(ComplexVec::from_real(r)?);
    let real = theorem1_global(&h)?.array_gain(&h)?;
    let dims = 2 * (r.len() - 1);
    let best = (0..n_restarts)
        .into_par_iter()
        .map(|k| {
            let mut gen = rng.child(format!("restart-{k}")).rng();
            let start: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(&mut gen)).collect();
            local_search(r, start)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ProbeReport {
        restarts: n_restarts,
        best_complex_objective: Some(best),
        best_real_objective: Some(real),
        relative_gap: Some((best - real) / real),
    })
}
