use rayon::prelude::*;

use super::bussgang::bussgang_metrics;
use super::sweep::{LinkSetup, PrecoderChoice};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Gaussian-signalling achievable rate `log2(1 + SNDR)` in bits per symbol.
pub fn achievable_rate(sndr: f64) -> Result<f64> {
    if !(sndr >= 0.0) {
        return Err(Error::param(format!("SNDR must be non-negative, got {sndr}")));
    }
    Ok((1.0 + sndr).log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Mean rate over channels where the precoder was feasible.
    pub mean_rate: f64,
    pub n_channels: usize,
    pub n_infeasible: usize,
}

/// Average achievable rate over `n_channels` independent channel draws.
///
/// Channel `c` uses streams `rng.child("channel-c")` and
/// `rng.child("symbols-c")`, so different precoder choices see the same
/// channels and symbols.
pub fn ergodic_rate(
    setup: &LinkSetup,
    choice: &PrecoderChoice,
    n_channels: usize,
    rng: RngStream,
) -> Result<RateEstimate> {
    if n_channels < 10 {
        return Err(Error::param(format!("need at least 10 channel draws, got {n_channels}")));
    }
    let rates: Vec<Option<f64>> = (0..n_channels)
        .into_par_iter()
        .map(|c| {
            let h = setup.channel.draw(setup.m, rng.child(format!("channel-{c}")))?;
            let Some(w) = choice.build(&h)? else {
                return Ok(None);
            };
            let metrics = bussgang_metrics(
                &h,
                &w,
                &setup.pa,
                setup.p,
                setup.sigma_v2,
                setup.n_symbols,
                rng.child(format!("symbols-{c}")),
            )?;
            achievable_rate(metrics.sndr).map(Some)
        })
        .collect::<Result<_>>()?;
    let feasible: Vec<f64> = rates.iter().flatten().copied().collect();
    let n_infeasible = n_channels - feasible.len();
    if feasible.is_empty() {
        return Err(Error::Infeasible);
    }
    Ok(RateEstimate {
        mean_rate: feasible.iter().sum::<f64>() / feasible.len() as f64,
        n_channels,
        n_infeasible,
    })
}
