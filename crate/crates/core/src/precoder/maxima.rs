//! Maxima of the real-gain SNR problem under the power and third-order-null
//! constraints.
//!
//! The maximum with antenna `m'` saturated has gains
//! `g_m ∝ (-1 + √(1 + r_m² ξ)) / r_m` for `m ≠ m'` and
//! `g_m' ∝ (-1 - √(1 + r_m'² ξ)) / r_m'`, where `ξ > 0` zeroes
//!
//! ```text
//! F(ξ) = Σ_{m≠m'} (-1 + √(1 + r_m² ξ))³ / r_m²  -  (1 + √(1 + r_m'² ξ))³ / r_m'²
//! ```
//!
//! `F(0) < 0` and `F` grows like `ξ^{3/2} (Σ_{m≠m'} r_m - r_m')`, so a root
//! exists when the other antennas' gains outweigh the saturated one.

use rayon::prelude::*;

use super::{check_positive_gains, from_real_gains, Precoder, PrecoderKind};
use crate::channel::ChannelVector;
use crate::error::{Error, Result};

/// Relative tolerance for the ξ line search.
pub const XI_TOL: f64 = 1e-12;
pub const XI_MAX_ITER: usize = 200;

/// Upper end of the bracket search, in units of `(min r)^{-2}`.
const XI_MAX_SCALE: f64 = 1e12;

/// Relative margin a candidate maximum needs over the incumbent to win.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    pub xi: f64,
    /// `F(ξ)` divided by the saturated-antenna term `(1 + √(1 + r_m'² ξ))³ / r_m'²`.
    pub residual: f64,
    pub iterations: usize,
    pub feasible: bool,
}

/// `-1 + √(1 + x)` without cancellation for small `x`.
#[inline]
fn sqrt1p_minus_1(x: f64) -> f64 {
    x / (1.0 + (1.0 + x).sqrt())
}

/// `(F(ξ), saturated term)`.
fn xi_terms(r: &[f64], m_prime: usize, xi: f64) -> (f64, f64) {
    let mut free = 0.0;
    for (i, &x) in r.iter().enumerate() {
        if i != m_prime {
            let a = sqrt1p_minus_1(x * x * xi);
            free += a * a * a / (x * x);
        }
    }
    let rp = r[m_prime];
    let b = 1.0 + (1.0 + rp * rp * xi).sqrt();
    let sat = b * b * b / (rp * rp);
    (free - sat, sat)
}

/// The line-search equation `F(ξ)`.
pub fn xi_equation(r: &[f64], m_prime: usize, xi: f64) -> f64 {
    xi_terms(r, m_prime, xi).0
}

/// Finds `ξ > 0` with `F(ξ) = 0` by doubling from `ξ = 1` up to
/// `1e12 / min(r)²`, then bisecting.
///
/// `tol` bounds both the relative bracket width and the relative residual
/// needed to report the solve as feasible.
pub fn theorem1_xi_solve(r: &[f64], m_prime: usize, tol: f64, max_iter: usize) -> Result<LineSearchResult> {
    if r.len() < 2 {
        return Err(Error::param("line search needs at least two antennas"));
    }
    if m_prime >= r.len() {
        return Err(Error::param(format!("saturated antenna {m_prime} out of range")));
    }
    if let Some(i) = r.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::param(format!("channel gain r[{i}] = {} is not positive", r[i])));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }

    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    let xi_max = XI_MAX_SCALE / (r_min * r_min);

    // Bracket.
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut iterations = 0;
    loop {
        let (f, _) = xi_terms(r, m_prime, hi);
        iterations += 1;
        if f >= 0.0 {
            break;
        }
        if hi >= xi_max {
            let (f, sat) = xi_terms(r, m_prime, hi);
            return Ok(LineSearchResult { xi: hi, residual: f / sat, iterations, feasible: false });
        }
        lo = hi;
        hi = (hi * 2.0).min(xi_max);
    }

    // Bisect.
    let mut best = hi;
    for _ in 0..max_iter {
        let (f_hi, sat_hi) = xi_terms(r, m_prime, hi);
        if f_hi.abs() <= tol * sat_hi * 1e-3 || hi - lo <= tol * hi * 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let (f_mid, _) = xi_terms(r, m_prime, mid);
        if f_mid >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        best = hi;
    }
    // Report the bracket end with the smaller residual.
    let (f_hi, sat_hi) = xi_terms(r, m_prime, best);
    let (f_lo, sat_lo) = xi_terms(r, m_prime, lo);
    let (xi, residual) = if lo > 0.0 && (f_lo / sat_lo).abs() < (f_hi / sat_hi).abs() {
        (lo, f_lo / sat_lo)
    } else {
        (best, f_hi / sat_hi)
    };
    Ok(LineSearchResult { xi, residual, iterations, feasible: residual.abs() <= tol })
}

/// Maximum with antenna `m_prime` saturated, or `None` when no positive `ξ`
/// satisfies the null constraint.
pub fn theorem1_max(h: &ChannelVector, m_prime: usize) -> Result<Option<Precoder>> {
    let r = h.magnitudes();
    check_positive_gains(&r)?;
    let ls = theorem1_xi_solve(&r, m_prime, XI_TOL, XI_MAX_ITER)?;
    if !ls.feasible {
        return Ok(None);
    }
    let mut gains: Vec<f64> = r.iter().map(|&x| sqrt1p_minus_1(x * x * ls.xi) / x).collect();
    // The saturated gain is re-derived from the null constraint so that the
    // third-order residual vanishes to rounding rather than to the line-search
    // tolerance.
    let rp = r[m_prime];
    let others: f64 = r
        .iter()
        .zip(&gains)
        .enumerate()
        .filter(|(i, _)| *i != m_prime)
        .map(|(_, (x, g))| x * g * g * g)
        .sum();
    gains[m_prime] = -(others / rp).cbrt();
    from_real_gains(h, &gains, PrecoderKind::Theorem1Max, vec![m_prime], Some(ls.xi)).map(Some)
}

/// All `M` candidate maxima, indexed by saturated antenna.
pub fn theorem1_all(h: &ChannelVector) -> Result<Vec<Option<Precoder>>> {
    check_positive_gains(&h.magnitudes())?;
    (0..h.len()).into_par_iter().map(|m| theorem1_max(h, m)).collect()
}

/// Best of the `M` maxima by array gain; ties go to the smallest index.
pub fn theorem1_global(h: &ChannelVector) -> Result<Precoder> {
    let mut best: Option<(f64, Precoder)> = None;
    for p in theorem1_all(h)?.into_iter().flatten() {
        let gain = p.array_gain(h)?;
        match &best {
            Some((g, _)) if gain <= g * (1.0 + TIE_TOL) => {}
            _ => best = Some((gain, p)),
        }
    }
    best.map(|(_, p)| p).ok_or(Error::Infeasible)
}
