//! Bussgang decomposition `r = G s + d + v` estimated by Monte Carlo over the
//! transmit symbol.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::pa::PaModel;
use crate::precoder::Precoder;
use crate::rng::{complex_gaussian, RngStream};

pub const DEFAULT_N_SYMBOLS: usize = 100_000;
pub const MIN_N_SYMBOLS: usize = 1_000;

/// Distortion below `10^{-SDR_CAP_DB/10}` times the signal power is reported
/// as zero, and the SDR as this cap.
pub const SDR_CAP_DB: f64 = 200.0;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub bussgang_gain: Complex64,
    /// `|G|² p`.
    pub signal_power: f64,
    /// `E|d|²`, clipped to zero below the SDR cap.
    pub distortion_power: f64,
    pub noise_power: f64,
    pub snr: f64,
    pub sdr: f64,
    pub sndr: f64,
    pub n_symbols: usize,
}

impl LinkMetrics {
    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr.log10()
    }

    pub fn sdr_db(&self) -> f64 {
        10.0 * self.sdr.log10()
    }

    pub fn sndr_db(&self) -> f64 {
        10.0 * self.sndr.log10()
    }
}

/// Draws `n_symbols` symbols `s ~ CN(0, p)`, forms the noiseless received
/// signal `Σ h_m PA(w_m s)` and estimates
///
/// - `G = Σ r s* / Σ |s|²`
/// - `E|d|² = mean |r - G s|²`
///
/// Noise enters analytically through `sigma_v2`. Normalizing by the sample
/// symbol power makes the distortion estimate exactly zero for a linear
/// channel, so the only Monte Carlo error left is that of the true
/// distortion.
pub fn bussgang_metrics(
    h: &ChannelVector,
    precoder: &Precoder,
    pa: &PaModel,
    p: f64,
    sigma_v2: f64,
    n_symbols: usize,
    rng: RngStream,
) -> Result<LinkMetrics> {
    if h.len() != precoder.len() {
        return Err(Error::param("channel and precoder lengths differ"));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param(format!("symbol power must be positive, got {p}")));
    }
    if !(sigma_v2 > 0.0 && sigma_v2.is_finite()) {
        return Err(Error::param(format!("noise variance must be positive, got {sigma_v2}")));
    }
    if n_symbols < MIN_N_SYMBOLS {
        return Err(Error::param(format!("need at least {MIN_N_SYMBOLS} symbols, got {n_symbols}")));
    }
    pa.validate()?;

    let mut gen = rng.rng();
    let symbols: Vec<Complex64> = (0..n_symbols).map(|_| complex_gaussian(&mut gen, p)).collect();
    let h = h.h.as_slice();
    let w = precoder.w.as_slice();

    let received: Vec<Complex64> = symbols
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| {
            chunk.iter().map(|&s| {
                h.iter().zip(w).map(|(&hm, &wm)| hm * pa.amplify(wm * s)).sum::<Complex64>()
            })
        })
        .collect();

    // Chunked partial sums reduced in order keep results independent of the
    // thread count.
    let partials: Vec<(Complex64, f64)> = received
        .par_chunks(CHUNK)
        .zip(symbols.par_chunks(CHUNK))
        .map(|(r, s)| {
            r.iter().zip(s).fold((Complex64::new(0.0, 0.0), 0.0), |(c, e), (r, s)| {
                (c + r * s.conj(), e + s.norm_sqr())
            })
        })
        .collect();
    let (cross, energy) = partials
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(c, e), (pc, pe)| (c + pc, e + pe));
    let gain = cross / energy;

    let residual: f64 = received
        .par_chunks(CHUNK)
        .zip(symbols.par_chunks(CHUNK))
        .map(|(r, s)| r.iter().zip(s).map(|(r, s)| (r - gain * s).norm_sqr()).sum::<f64>())
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let distortion = residual / n_symbols as f64;

    let signal = gain.norm_sqr() * p;
    let cap = 10f64.powf(SDR_CAP_DB / 10.0);
    let (distortion_power, sdr) = if distortion <= signal / cap {
        (0.0, cap)
    } else {
        (distortion, signal / distortion)
    };
    Ok(LinkMetrics {
        bussgang_gain: gain,
        signal_power: signal,
        distortion_power,
        noise_power: sigma_v2,
        snr: signal / sigma_v2,
        sdr,
        sndr: signal / (distortion_power + sigma_v2),
        n_symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{iid_rayleigh, los_ula};
    use crate::precoder::{mrt, z3ro_heuristic};
    use crate::rng::derive_stream;

    #[test]
    fn linear_pa_mrt_matches_closed_form() {
        let h = los_ula(16, 0.5, 1.1, 0.5).unwrap();
        let w = mrt(&h).unwrap();
        let m = bussgang_metrics(&h, &w, &PaModel::IdealLinear, 2.0, 0.3, 2000, derive_stream(1, "a")).unwrap();
        let expected = 0.5 * 2.0 * 16.0 / 0.3;
        assert!((m.snr - expected).abs() < 1e-9 * expected);
        assert_eq!(m.distortion_power, 0.0);
        assert!((m.sdr_db() - SDR_CAP_DB).abs() < 1e-9);
    }

    #[test]
    fn third_order_pa_nulled_by_z3ro() {
        let h = iid_rayleigh(24, 1.0, derive_stream(2, "h")).unwrap();
        let w = z3ro_heuristic(&h, &[5, 9]).unwrap();
        let pa = PaModel::ThirdOrder { a3: Complex64::new(-0.08, 0.02) };
        let m = bussgang_metrics(&h, &w, &pa, 1.0, 0.01, 4000, derive_stream(2, "s")).unwrap();
        assert_eq!(m.distortion_power, 0.0);
        let m_mrt = bussgang_metrics(&h, &mrt(&h).unwrap(), &pa, 1.0, 0.01, 4000, derive_stream(2, "s")).unwrap();
        assert!(m_mrt.distortion_power > 0.0);
        assert!(m_mrt.sdr_db() < 60.0);
    }

    #[test]
    fn sndr_is_harmonic_combination() {
        let h = los_ula(8, 1.0, 0.4, 0.5).unwrap();
        let pa = PaModel::rapp(2.0, 0.1).unwrap();
        let m = bussgang_metrics(&h, &mrt(&h).unwrap(), &pa, 1.0, 0.05, 5000, derive_stream(3, "s")).unwrap();
        let combined = 1.0 / (1.0 / m.snr + 1.0 / m.sdr);
        assert!((m.sndr - combined).abs() < 1e-9 * m.sndr);
        assert!(m.sndr <= m.snr.min(m.sdr));
    }

    #[test]
    fn input_validation() {
        let h = los_ula(4, 1.0, 0.4, 0.5).unwrap();
        let w = mrt(&h).unwrap();
        let s = derive_stream(0, "v");
        let pa = PaModel::IdealLinear;
        assert!(bussgang_metrics(&h, &w, &pa, 1.0, 1.0, 999, s).is_err());
        assert!(bussgang_metrics(&h, &w, &pa, 0.0, 1.0, 1000, s).is_err());
        assert!(bussgang_metrics(&h, &w, &pa, 1.0, 0.0, 1000, s).is_err());
        let h5 = los_ula(5, 1.0, 0.4, 0.5).unwrap();
        assert!(bussgang_metrics(&h5, &w, &pa, 1.0, 1.0, 1000, s).is_err());
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let h = iid_rayleigh(32, 1.0, derive_stream(4, "h")).unwrap();
        let w = mrt(&h).unwrap();
        let pa = PaModel::rapp(2.0, 0.02).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bussgang_metrics(&h, &w, &pa, 1.0, 0.1, 20_000, derive_stream(4, "s")).unwrap())
        };
        let a = run(1);
        let b = run(7);
        assert_eq!(a.bussgang_gain, b.bussgang_gain);
        assert_eq!(a.distortion_power.to_bits(), b.distortion_power.to_bits());
    }
}
