//! Link-level analysis: closed-form SNRs, Bussgang metrics, radiation
//! patterns and rates.

mod bussgang;
mod pattern;
mod rate;
mod snr;
mod sweep;

pub use bussgang::{bussgang_metrics, LinkMetrics, DEFAULT_N_SYMBOLS, MIN_N_SYMBOLS, SDR_CAP_DB};
pub use pattern::{
    pattern_point, radiation_pattern, uniform_grid, PatternSample, DEFAULT_PATTERN_POINTS, PATTERN_FLOOR_DB,
};
pub use rate::{achievable_rate, ergodic_rate, RateEstimate};
pub use snr::{array_gain_penalty_db, snr_closed_form_mrt, snr_closed_form_z3ro_los, z3ro_los_gain_factor};
pub use sweep::{BackoffMode, ChannelSpec, LinkSetup, OperatingPoint, PrecoderChoice};
