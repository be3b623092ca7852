//! Precoder construction.
//!
//! Every precoder here has unit transmit power `Σ|w_m|² = 1` and is rotated
//! so that the array gain `Σ h_m w_m` is real and positive. All precoders
//! except MRT also satisfy the third-order null `Σ h_m w_m |w_m|² = 0`.

mod maxima;
mod z3ro;

pub use maxima::{
    theorem1_all, theorem1_global, theorem1_max, theorem1_xi_solve, xi_equation, LineSearchResult,
    XI_MAX_ITER, XI_TOL,
};
pub use z3ro::{los_critical_point, los_critical_point_for, median_gain_set, z3ro_heuristic};

use num_complex::Complex64;

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::types::ComplexVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecoderKind {
    Mrt,
    Z3roHeuristic,
    LosCritical,
    Theorem1Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub w: ComplexVec,
    /// Antennas driven with negative real gain, ascending.
    pub saturated_set: Vec<usize>,
    pub kind: PrecoderKind,
    /// Line-search multiplier ratio, for line-search maxima only.
    pub xi: Option<f64>,
    /// Normalization constant applied to the unnormalized gains.
    pub alpha: f64,
}

impl Precoder {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Complex array gain `Σ h_m w_m`.
    pub fn combined_gain(&self, h: &ChannelVector) -> Result<Complex64> {
        check_lengths(h, &self.w)?;
        Ok(h.h.iter().zip(self.w.iter()).map(|(a, b)| a * b).sum())
    }

    /// Array gain `|Σ h_m w_m|²`.
    pub fn array_gain(&self, h: &ChannelVector) -> Result<f64> {
        Ok(self.combined_gain(h)?.norm_sqr())
    }

    pub fn distortion_residual(&self, h: &ChannelVector) -> Result<Complex64> {
        distortion_residual(h, &self.w)
    }

    /// Per-antenna real gains `g_m` such that `w_m = g_m e^{-j∠h_m}` (up to the
    /// global phase convention). Only meaningful for precoders built from real
    /// gains on the same channel.
    pub fn real_gains(&self, h: &ChannelVector) -> Vec<f64> {
        self.w
            .iter()
            .zip(h.conjugate_phasors())
            .map(|(w, ph)| (w / ph).re)
            .collect()
    }
}

fn check_lengths(h: &ChannelVector, w: &ComplexVec) -> Result<()> {
    if h.len() != w.len() {
        return Err(Error::param(format!(
            "channel has {} antennas but precoder has {}",
            h.len(),
            w.len()
        )));
    }
    Ok(())
}

/// Third-order distortion amplitude at the user, `Σ h_m w_m |w_m|²`.
pub fn distortion_residual(h: &ChannelVector, w: &ComplexVec) -> Result<Complex64> {
    check_lengths(h, w)?;
    Ok(h.h.iter().zip(w.iter()).map(|(h, w)| h * w * w.norm_sqr()).sum())
}

/// Conjugate matching `w_m = h_m* / ‖h‖`.
pub fn mrt(h: &ChannelVector) -> Result<Precoder> {
    let norm = h.h.power().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateChannel("all channel gains are zero".into()));
    }
    let alpha = 1.0 / norm;
    let w = h.h.iter().map(|z| z.conj() * alpha).collect();
    Ok(Precoder {
        w: ComplexVec::new(w)?,
        saturated_set: Vec::new(),
        kind: PrecoderKind::Mrt,
        xi: None,
        alpha,
    })
}

/// Turns real gains into a unit-power precoder `w_m = α g_m e^{-j∠h_m}` with a
/// real-positive array gain.
pub(crate) fn from_real_gains(
    h: &ChannelVector,
    gains: &[f64],
    kind: PrecoderKind,
    saturated_set: Vec<usize>,
    xi: Option<f64>,
) -> Result<Precoder> {
    debug_assert_eq!(h.len(), gains.len());
    let alpha = 1.0 / gains.iter().map(|g| g * g).sum::<f64>().sqrt();
    let w: Vec<Complex64> = gains
        .iter()
        .zip(h.conjugate_phasors())
        .map(|(g, ph)| ph * (g * alpha))
        .collect();
    let mut precoder = Precoder {
        w: ComplexVec::new(w)?,
        saturated_set,
        kind,
        xi,
        alpha,
    };
    align_phase(&mut precoder, h)?;
    Ok(precoder)
}

/// Rotates `w` globally so that `Σ h_m w_m` is real and positive. A zero
/// array gain leaves `w` untouched.
pub fn align_phase(precoder: &mut Precoder, h: &ChannelVector) -> Result<()> {
    let gain = precoder.combined_gain(h)?;
    let mag = gain.norm();
    if mag > 0.0 {
        let rot = gain.conj() / mag;
        // Skip the multiply when already aligned so real gains stay exact.
        if (rot - Complex64::new(1.0, 0.0)).norm() > 0.0 {
            precoder.w = precoder.w.scaled(rot);
        }
    }
    Ok(())
}

pub(crate) fn check_positive_gains(r: &[f64]) -> Result<()> {
    if let Some(i) = r.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::DegenerateChannel(format!(
            "antenna {i} has zero channel gain; strip inactive antennas first"
        )));
    }
    Ok(())
}
