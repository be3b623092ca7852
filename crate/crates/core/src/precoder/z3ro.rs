//! Closed-form zero-third-order precoders: the general-channel heuristic and
//! the line-of-sight critical points.

use std::cmp::Ordering;

use super::{check_positive_gains, from_real_gains, Precoder, PrecoderKind};
use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::types::ComplexVec;

fn normalize_set(set: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&i) = set.iter().find(|&&i| i >= m) {
        return Err(Error::InvalidSet(format!("antenna index {i} out of range for {m} antennas")));
    }
    if set.is_empty() || 2 * set.len() >= m {
        return Err(Error::InvalidSet(format!(
            "saturated set must satisfy 0 < M_s < M/2 (M_s = {}, M = {m})",
            set.len()
        )));
    }
    Ok(set)
}

/// Heuristic zero-third-order precoder for an arbitrary channel.
///
/// Non-saturated antennas get gain `r_m`, saturated ones `-γ r_m` with
/// `γ = (Σ_{m∉S} r_m⁴ / Σ_{m∈S} r_m⁴)^{1/3}`, which zeroes `Σ r_m g_m³`
/// exactly.
pub fn z3ro_heuristic(h: &ChannelVector, saturated_set: &[usize]) -> Result<Precoder> {
    let m = h.len();
    let set = normalize_set(saturated_set, m)?;
    let r = h.magnitudes();
    check_positive_gains(&r)?;

    let mut in_set = vec![false; m];
    for &i in &set {
        in_set[i] = true;
    }
    let (mut free, mut sat) = (0.0, 0.0);
    for (i, &x) in r.iter().enumerate() {
        let x4 = x.powi(4);
        if in_set[i] {
            sat += x4;
        } else {
            free += x4;
        }
    }
    let gamma = (free / sat).cbrt();
    let gains: Vec<f64> = r
        .iter()
        .zip(&in_set)
        .map(|(&x, &s)| if s { -gamma * x } else { x })
        .collect();
    from_real_gains(h, &gains, PrecoderKind::Z3roHeuristic, set, None)
}

/// The `m_s` antennas whose gain is closest to the median gain, ascending.
/// Ties go to the lower index.
pub fn median_gain_set(r: &[f64], m_s: usize) -> Vec<usize> {
    if r.is_empty() {
        return Vec::new();
    }
    let mut sorted = r.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let da = (r[a] - median).abs();
        let db = (r[b] - median).abs();
        da.partial_cmp(&db).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let mut set: Vec<usize> = idx.into_iter().take(m_s.min(n)).collect();
    set.sort_unstable();
    set
}

fn los_critical_gains(m: usize, m_s: usize) -> Result<Vec<f64>> {
    if m_s == 0 || 2 * m_s > m {
        return Err(Error::InvalidSet(format!(
            "saturated count must satisfy 0 < M_s <= M/2 (M_s = {m_s}, M = {m})"
        )));
    }
    let c = ((m - m_s) as f64 / m_s as f64).cbrt();
    Ok((0..m).map(|i| if i < m_s { -c } else { 1.0 }).collect())
}

/// LOS critical point with antennas `0..m_s` saturated, for a channel with
/// zero phases: `g ∝ [-((M-M_s)/M_s)^{1/3}, …, 1, …]`.
///
/// `M_s = M/2` is accepted and gives the symmetric point with zero array
/// gain (the two-antenna case).
pub fn los_critical_point(m: usize, m_s: usize, beta: f64) -> Result<Precoder> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param(format!("beta must be positive, got {beta}")));
    }
    let amp = beta.sqrt();
    let h = ChannelVector::explicit(ComplexVec::from_real(&vec![amp; m.max(1)])?);
    if m == 0 {
        return Err(Error::param("number of antennas must be at least 1"));
    }
    los_critical_point_for(&h, m_s)
}

/// LOS critical point on an arbitrary constant-modulus channel: the real
/// gains of [`los_critical_point`] with the channel phases undone.
pub fn los_critical_point_for(h: &ChannelVector, m_s: usize) -> Result<Precoder> {
    let r = h.magnitudes();
    check_positive_gains(&r)?;
    let r0 = r[0];
    if r.iter().any(|&x| (x - r0).abs() > 1e-9 * r0) {
        return Err(Error::param("LOS critical points need a constant-modulus channel"));
    }
    let gains = los_critical_gains(h.len(), m_s)?;
    from_real_gains(h, &gains, PrecoderKind::LosCritical, (0..m_s).collect(), None)
}
