//! Experiment building blocks shared by sweeps: channel draws, precoder
//! choices and back-off operating points.

use crate::channel::{iid_rayleigh, los_ula, ChannelVector};
use crate::error::{Error, Result};
use crate::pa::PaModel;
use crate::precoder::{
    los_critical_point_for, median_gain_set, mrt, theorem1_global, z3ro_heuristic, Precoder,
};
use crate::rng::RngStream;
use crate::types::{db_to_linear, Decibel};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Los { beta: f64, theta_rad: f64, spacing_over_lambda: f64 },
    Rayleigh { beta: f64 },
    Explicit(ChannelVector),
}

impl ChannelSpec {
    /// Average per-antenna channel power.
    pub fn beta(&self) -> f64 {
        match self {
            ChannelSpec::Los { beta, .. } | ChannelSpec::Rayleigh { beta } => *beta,
            ChannelSpec::Explicit(h) => h.h.power() / h.len() as f64,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, ChannelSpec::Rayleigh { .. })
    }

    /// One channel realization. Deterministic channels ignore `rng`.
    pub fn draw(&self, m: usize, rng: RngStream) -> Result<ChannelVector> {
        match self {
            ChannelSpec::Los { beta, theta_rad, spacing_over_lambda } => {
                los_ula(m, *beta, *theta_rad, *spacing_over_lambda)
            }
            ChannelSpec::Rayleigh { beta } => iid_rayleigh(m, *beta, rng),
            ChannelSpec::Explicit(h) => {
                if h.len() != m {
                    return Err(Error::param(format!(
                        "explicit channel has {} antennas, expected {m}",
                        h.len()
                    )));
                }
                Ok(h.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrecoderChoice {
    Mrt,
    /// Heuristic with the `m_s` median-gain antennas saturated.
    Z3ro { m_s: usize },
    /// Heuristic with an explicit saturated set.
    Z3roSet(Vec<usize>),
    /// LOS critical point with antennas `0..m_s` saturated.
    LosCritical { m_s: usize },
    /// Best line-search maximum.
    Theorem1Global,
}

impl PrecoderChoice {
    /// `Ok(None)` when the choice has no feasible precoder on this channel.
    pub fn build(&self, h: &ChannelVector) -> Result<Option<Precoder>> {
        match self {
            PrecoderChoice::Mrt => mrt(h).map(Some),
            PrecoderChoice::Z3ro { m_s } => z3ro_heuristic(h, &median_gain_set(&h.magnitudes(), *m_s)).map(Some),
            PrecoderChoice::Z3roSet(set) => z3ro_heuristic(h, set).map(Some),
            PrecoderChoice::LosCritical { m_s } => los_critical_point_for(h, *m_s).map(Some),
            PrecoderChoice::Theorem1Global => match theorem1_global(h) {
                Ok(p) => Ok(Some(p)),
                Err(Error::Infeasible) => Ok(None),
                Err(e) => Err(e),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            PrecoderChoice::Mrt => "mrt".into(),
            PrecoderChoice::Z3ro { m_s } => format!("z3ro-ms{m_s}"),
            PrecoderChoice::Z3roSet(set) => {
                let s: Vec<String> = set.iter().map(|i| i.to_string()).collect();
                format!("z3ro-set{}", s.join("-"))
            }
            PrecoderChoice::LosCritical { m_s } => format!("los-critical-ms{m_s}"),
            PrecoderChoice::Theorem1Global => "max-global".into(),
        }
    }
}

/// How the back-off `p_PA / p_sat` (with `p_PA = p/M`) is swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackoffMode {
    /// `p = 1` fixed, `p_sat` varies; the budget is `M β p / σ_v²`.
    FixedPpa,
    /// `p_sat = 1` fixed, `p` varies; the budget is `M β p_sat / σ_v²`.
    FixedPsat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub p: f64,
    pub p_sat: f64,
    pub sigma_v2: f64,
}

impl BackoffMode {
    pub fn operating_point(&self, m: usize, beta: f64, budget_db: f64, backoff_db: f64) -> OperatingPoint {
        let budget = db_to_linear(Decibel(budget_db));
        let backoff = db_to_linear(Decibel(backoff_db));
        let m = m as f64;
        match self {
            BackoffMode::FixedPpa => {
                let p = 1.0;
                OperatingPoint { p, p_sat: p / m / backoff, sigma_v2: m * beta * p / budget }
            }
            BackoffMode::FixedPsat => {
                let p_sat = 1.0;
                OperatingPoint { p: m * p_sat * backoff, p_sat, sigma_v2: m * beta * p_sat / budget }
            }
        }
    }
}

/// Everything needed to evaluate one link apart from the precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSetup {
    pub m: usize,
    pub channel: ChannelSpec,
    pub pa: PaModel,
    pub p: f64,
    pub sigma_v2: f64,
    pub n_symbols: usize,
}
