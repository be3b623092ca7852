use crate::error::{Error, Result};

pub fn snr_closed_form_mrt(m: usize, beta: f64, p: f64, sigma_v2: f64) -> Result<f64> {
    if !(sigma_v2 > 0.0) {
        return Err(Error::param("noise variance must be positive"));
    }
    Ok(beta * p * m as f64 / sigma_v2)
}

/// Array-gain factor of the LOS critical point relative to MRT,
/// `(ζ^{2/3} - (1-ζ)^{2/3})² / (ζ^{1/3} + (1-ζ)^{1/3})` with `ζ = M_s/M`.
///
/// `M_s = M/2` is allowed and gives 0.
pub fn z3ro_los_gain_factor(m: usize, m_s: usize) -> Result<f64> {
    if m_s == 0 || 2 * m_s > m {
        return Err(Error::param(format!(
            "saturated set must satisfy 0 < M_s < M/2 (M_s = {m_s}, M = {m})"
        )));
    }
    let z = m_s as f64 / m as f64;
    let num = z.powf(2.0 / 3.0) - (1.0 - z).powf(2.0 / 3.0);
    Ok(num * num / (z.cbrt() + (1.0 - z).cbrt()))
}

pub fn snr_closed_form_z3ro_los(m: usize, m_s: usize, beta: f64, p: f64, sigma_v2: f64) -> Result<f64> {
    Ok(snr_closed_form_mrt(m, beta, p, sigma_v2)? * z3ro_los_gain_factor(m, m_s)?)
}

/// Array-gain loss of the LOS critical point versus MRT, in dB (positive).
pub fn array_gain_penalty_db(m: usize, m_s: usize) -> Result<f64> {
    Ok(-10.0 * z3ro_los_gain_factor(m, m_s)?.log10())
}
