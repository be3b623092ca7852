//! Channel vectors from the array to a single user.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::{complex_gaussian, RngStream};
use crate::types::ComplexVec;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Pure line-of-sight to a uniform linear array.
    LosUla {
        beta: f64,
        theta_rad: f64,
        spacing_over_lambda: f64,
    },
    /// Independent CN(0, beta) gains per antenna.
    IidRayleigh { beta: f64 },
    /// Gains supplied directly by the caller.
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub h: ComplexVec,
    pub model: ChannelModel,
}

impl ChannelVector {
    pub fn explicit(h: ComplexVec) -> Self {
        ChannelVector { h, model: ChannelModel::Explicit }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Per-antenna magnitudes `|h_m|`.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.h.iter().map(|z| z.norm()).collect()
    }

    /// `e^{-j∠h_m}` for each antenna; antennas with zero gain get phase 0.
    pub fn conjugate_phasors(&self) -> Vec<Complex64> {
        self.h
            .iter()
            .map(|z| {
                let r = z.norm();
                if r > 0.0 {
                    z.conj() / r
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect()
    }

    /// Copy with the antennas at `keep` only, in the given order.
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        let h = keep
            .iter()
            .map(|&i| {
                self.h
                    .as_slice()
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::param(format!("antenna index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelVector::explicit(ComplexVec::new(h)?))
    }

    /// Indices of antennas with nonzero gain. Precoder constructors reject
    /// zero-gain antennas, so callers strip them with this and [`select`](Self::select).
    pub fn active_antennas(&self) -> Vec<usize> {
        self.h.iter().enumerate().filter(|(_, z)| z.norm() > 0.0).map(|(i, _)| i).collect()
    }
}

fn check_len(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::param("number of antennas must be at least 1"));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::param(format!("path loss beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// `h_m = sqrt(beta)·exp(-j·m·2π·(d/λ)·cos θ)`.
pub fn los_ula(m: usize, beta: f64, theta_rad: f64, spacing_over_lambda: f64) -> Result<ChannelVector> {
    check_len(m)?;
    check_beta(beta)?;
    if !theta_rad.is_finite() {
        return Err(Error::param("user angle must be finite"));
    }
    if !(spacing_over_lambda.is_finite() && spacing_over_lambda > 0.0) {
        return Err(Error::param(format!(
            "antenna spacing must be positive, got {spacing_over_lambda}"
        )));
    }
    let amp = beta.sqrt();
    let h = steering_phases(m, theta_rad, spacing_over_lambda)
        .into_iter()
        .map(|phi| Complex64::from_polar(amp, -phi))
        .collect();
    Ok(ChannelVector {
        h: ComplexVec::new(h)?,
        model: ChannelModel::LosUla { beta, theta_rad, spacing_over_lambda },
    })
}

/// Independent CN(0, beta) gains drawn from `rng`.
pub fn iid_rayleigh(m: usize, beta: f64, rng: RngStream) -> Result<ChannelVector> {
    check_len(m)?;
    check_beta(beta)?;
    let mut gen = rng.rng();
    let h = (0..m).map(|_| complex_gaussian(&mut gen, beta)).collect();
    Ok(ChannelVector {
        h: ComplexVec::new(h)?,
        model: ChannelModel::IidRayleigh { beta },
    })
}

/// Array phases `m·2π·(d/λ)·cos θ̃` seen from direction `θ̃`.
pub fn steering_phases(m: usize, theta_tilde_rad: f64, spacing_over_lambda: f64) -> Vec<f64> {
    let k = 2.0 * PI * spacing_over_lambda * theta_tilde_rad.cos();
    (0..m).map(|i| i as f64 * k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn broadside_pair_is_all_ones() {
        let ch = los_ula(2, 1.0, FRAC_PI_2, 0.5).unwrap();
        for z in &ch.h {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn endfire_alternates_sign() {
        let ch = los_ula(3, 1.0, 0.0, 0.5).unwrap();
        let expected = [1.0, -1.0, 1.0];
        for (z, e) in ch.h.iter().zip(expected) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_modulus() {
        let ch = los_ula(4, 4.0, 0.3, 0.5).unwrap();
        assert!(ch.magnitudes().iter().all(|r| (r - 2.0).abs() < 1e-12));
    }

    #[test]
    fn bad_spacing_rejected() {
        assert!(matches!(los_ula(4, 1.0, 0.3, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(los_ula(4, 1.0, 0.3, -0.5), Err(Error::InvalidParameter(_))));
        assert!(los_ula(0, 1.0, 0.3, 0.5).is_err());
    }

    #[test]
    fn rayleigh_zero_beta_and_determinism() {
        let s = derive_stream(1, "ch");
        let zero = iid_rayleigh(8, 0.0, s).unwrap();
        assert!(zero.h.iter().all(|z| z.norm() == 0.0));
        assert_eq!(iid_rayleigh(8, 1.0, s).unwrap(), iid_rayleigh(8, 1.0, s).unwrap());
    }

    #[test]
    fn rayleigh_mean_power() {
        let m = 10_000;
        let ch = iid_rayleigh(m, 1.0, derive_stream(3, "lln")).unwrap();
        let mean = ch.h.power() / m as f64;
        assert!((mean - 1.0).abs() < 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn rayleigh_beta_scaling() {
        let s = derive_stream(5, "scale");
        let a = iid_rayleigh(16, 1.0, s).unwrap();
        let b = iid_rayleigh(16, 2.5, s).unwrap();
        for (x, y) in a.h.iter().zip(b.h.iter()) {
            assert!((y.norm_sqr() - 2.5 * x.norm_sqr()).abs() < 1e-12 * (1.0 + y.norm_sqr()));
        }
    }

    #[test]
    fn steering_examples() {
        assert!(steering_phases(5, FRAC_PI_2, 0.5).iter().all(|p| p.abs() < 1e-15));
        let p = steering_phases(2, 0.0, 0.5);
        assert_eq!(p[0], 0.0);
        assert!((p[1] - PI).abs() < 1e-15);
        assert_eq!(steering_phases(7, 0.7, 0.5), steering_phases(7, -0.7, 0.5));
    }

    #[test]
    fn select_and_active() {
        let h = ComplexVec::from_real(&[1.0, 0.0, 2.0]).unwrap();
        let ch = ChannelVector::explicit(h);
        assert_eq!(ch.active_antennas(), vec![0, 2]);
        let s = ch.select(&ch.active_antennas()).unwrap();
        assert_eq!(s.magnitudes(), vec![1.0, 2.0]);
        assert!(ch.select(&[5]).is_err());
    }
}
