//! Experiment configuration: a strict JSON file merged with command-line
//! overrides, then validated and resolved against per-experiment defaults.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use z3ro::PaModel;

use crate::io::read_channel_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ArrayGain,
    Pattern,
    CompareMaxima,
    SweepBackoffFixedPpa,
    SweepBackoffFixedPsat,
    ErgodicRate,
    Verify,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ArrayGain => "array-gain",
            Experiment::Pattern => "pattern",
            Experiment::CompareMaxima => "compare-maxima",
            Experiment::SweepBackoffFixedPpa => "sweep-backoff-fixed-ppa",
            Experiment::SweepBackoffFixedPsat => "sweep-backoff-fixed-psat",
            Experiment::ErgodicRate => "ergodic-rate",
            Experiment::Verify => "verify",
        }
    }

    fn is_sweep(&self) -> bool {
        matches!(
            self,
            Experiment::SweepBackoffFixedPpa | Experiment::SweepBackoffFixedPsat | Experiment::ErgodicRate
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    Los {
        #[serde(default = "unit")]
        beta: f64,
    },
    Rayleigh {
        #[serde(default = "unit")]
        beta: f64,
    },
    File {
        path: PathBuf,
    },
}

fn unit() -> f64 {
    1.0
}

/// Raw file contents; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "M_s")]
    pub m_s: Option<usize>,
    pub saturated_set: Option<Vec<usize>>,
    pub channel: Option<ChannelConfig>,
    pub pa: Option<String>,
    pub theta_deg: Option<f64>,
    pub spacing_over_lambda: Option<f64>,
    pub snr_budget_db: Option<f64>,
    pub backoff_grid_db: Option<Vec<f64>>,
    pub m_grid: Option<Vec<usize>>,
    pub precoders: Option<Vec<String>>,
    pub pattern_points: Option<usize>,
    pub grid_n: Option<usize>,
    pub n_symbols: Option<usize>,
    pub n_channels: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, Vec<FieldError>> {
        serde_json::from_str(text).map_err(|e| vec![FieldError::new("<file>", e.to_string())])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub reason: String,
}

impl FieldError {
    fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { path: path.into(), reason: reason.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

/// Fully resolved configuration, recorded verbatim in the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "M_s")]
    pub m_s: usize,
    pub saturated_set: Option<Vec<usize>>,
    pub channel: ChannelConfig,
    pub pa: String,
    pub theta_deg: f64,
    pub spacing_over_lambda: f64,
    pub snr_budget_db: f64,
    pub backoff_grid_db: Vec<f64>,
    pub m_grid: Vec<usize>,
    pub precoders: Vec<String>,
    pub pattern_points: usize,
    pub grid_n: usize,
    pub n_symbols: usize,
    pub n_channels: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

pub const PRECODER_NAMES: [&str; 5] = ["mrt", "z3ro", "los-critical", "max-global", "mrt-dpd"];

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn default_m_grid() -> Vec<usize> {
    (3..=12).map(|k| 1usize << k).collect()
}

impl ExperimentConfig {
    pub fn pa_model(&self) -> PaModel {
        self.pa.parse().expect("validated PA spec")
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    /// Merges defaults for `experiment` into `file` and validates the result.
    pub fn resolve(experiment: Experiment, file: ConfigFile) -> Result<Self, Vec<FieldError>> {
        let mut errors = Vec::new();
        if let Some(e) = file.experiment {
            let compatible = e == experiment
                || (matches!(e, Experiment::SweepBackoffFixedPpa | Experiment::SweepBackoffFixedPsat)
                    && matches!(experiment, Experiment::SweepBackoffFixedPpa | Experiment::SweepBackoffFixedPsat));
            if !compatible {
                errors.push(FieldError::new(
                    "experiment",
                    format!("config is for {} but {} was requested", e.name(), experiment.name()),
                ));
            }
        }

        let channel = file.channel.unwrap_or(match experiment {
            Experiment::CompareMaxima | Experiment::ErgodicRate => ChannelConfig::Rayleigh { beta: 1.0 },
            _ => ChannelConfig::Los { beta: 1.0 },
        });
        let file_len = match &channel {
            ChannelConfig::File { path } => match read_channel_csv(path) {
                Ok(h) => Some(h.len()),
                Err(e) => {
                    errors.push(FieldError::new("channel.path", e.to_string()));
                    None
                }
            },
            ChannelConfig::Los { beta } | ChannelConfig::Rayleigh { beta } => {
                if !(*beta > 0.0 && beta.is_finite()) {
                    errors.push(FieldError::new("channel.beta", "must be positive and finite"));
                }
                None
            }
        };

        if experiment == Experiment::ArrayGain && !matches!(channel, ChannelConfig::Los { .. }) {
            errors.push(FieldError::new("channel", "array-gain uses the closed form for LOS channels"));
        }

        let default_m = match experiment {
            Experiment::Pattern => 32,
            _ => 64,
        };
        let m = match (file.m, file_len) {
            (Some(m), Some(n)) if m != n => {
                errors.push(FieldError::new("M", format!("channel file has {n} antennas but M = {m}")));
                m
            }
            (Some(m), _) => m,
            (None, Some(n)) => n,
            (None, None) => default_m,
        };

        let default_m_s = match experiment {
            Experiment::ArrayGain | Experiment::Pattern | Experiment::CompareMaxima => 1,
            _ => 4,
        };
        let m_s = match (&file.saturated_set, file.m_s) {
            (Some(set), Some(ms)) if set.len() != ms => {
                errors.push(FieldError::new(
                    "saturated_set",
                    format!("has {} entries but M_s = {ms}", set.len()),
                ));
                ms
            }
            (Some(set), _) => set.len(),
            (None, Some(ms)) => ms,
            (None, None) => default_m_s,
        };

        let m_grid = file.m_grid.unwrap_or_else(default_m_grid);
        if experiment == Experiment::ArrayGain {
            if m_grid.is_empty() {
                errors.push(FieldError::new("m_grid", "must not be empty"));
            }
            if m_grid.windows(2).any(|w| w[0] >= w[1]) {
                errors.push(FieldError::new("m_grid", "must be sorted strictly ascending"));
            }
            if m_s == 0 || m_grid.iter().any(|&mm| 2 * m_s >= mm) {
                errors.push(FieldError::new("M_s", "saturated set must satisfy 0 < M_s < M/2"));
            }
        } else if experiment != Experiment::Verify {
            if m < 2 {
                errors.push(FieldError::new("M", "must be at least 2"));
            }
            if m_s == 0 || 2 * m_s >= m {
                errors.push(FieldError::new("M_s", "saturated set must satisfy 0 < M_s < M/2"));
            }
        }
        if let Some(set) = &file.saturated_set {
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != set.len() {
                errors.push(FieldError::new("saturated_set", "indices must be distinct"));
            }
            if set.iter().any(|&i| i >= m) {
                errors.push(FieldError::new("saturated_set", format!("indices must be below M = {m}")));
            }
        }

        let default_pa = match experiment {
            Experiment::Pattern => "third-order:a3=-0.05",
            _ => "rapp:S=2,psat=1",
        };
        let pa = file.pa.unwrap_or_else(|| default_pa.to_string());
        match pa.parse::<PaModel>() {
            Err(e) => errors.push(FieldError::new("pa", e.to_string())),
            Ok(model) => {
                if experiment == Experiment::Pattern && !matches!(model, PaModel::ThirdOrder { .. }) {
                    errors.push(FieldError::new("pa", "pattern needs a third-order PA"));
                }
                if experiment.is_sweep() && model.p_sat().is_none() {
                    errors.push(FieldError::new("pa", "back-off sweeps need a PA with a saturation power"));
                }
            }
        }

        let theta_deg = file.theta_deg.unwrap_or(80.0);
        if !theta_deg.is_finite() {
            errors.push(FieldError::new("theta_deg", "must be finite"));
        }
        let spacing_over_lambda = file.spacing_over_lambda.unwrap_or(0.5);
        if !(spacing_over_lambda > 0.0 && spacing_over_lambda.is_finite()) {
            errors.push(FieldError::new("spacing_over_lambda", "must be positive"));
        }
        let snr_budget_db = file.snr_budget_db.unwrap_or(match experiment {
            Experiment::SweepBackoffFixedPsat => 29.0,
            _ => 26.0,
        });
        if !snr_budget_db.is_finite() {
            errors.push(FieldError::new("snr_budget_db", "must be finite"));
        }
        let backoff_grid_db = file.backoff_grid_db.unwrap_or_else(|| linspace(-10.0, 2.0, 20));
        if experiment.is_sweep() {
            if backoff_grid_db.is_empty() {
                errors.push(FieldError::new("backoff_grid_db", "must not be empty"));
            }
            if backoff_grid_db.iter().any(|x| !x.is_finite()) {
                errors.push(FieldError::new("backoff_grid_db", "values must be finite"));
            }
            if backoff_grid_db.windows(2).any(|w| w[0] >= w[1] || w[0].is_nan() || w[1].is_nan()) {
                errors.push(FieldError::new("backoff_grid_db", "must be sorted strictly ascending"));
            }
        }

        let precoders = file.precoders.unwrap_or_else(|| {
            let names: &[&str] = match experiment {
                Experiment::Pattern => &["mrt", "z3ro"],
                _ => &["mrt", "z3ro", "mrt-dpd"],
            };
            names.iter().map(|s| s.to_string()).collect()
        });
        if experiment == Experiment::Pattern || experiment.is_sweep() {
            if precoders.is_empty() {
                errors.push(FieldError::new("precoders", "must not be empty"));
            }
            for (i, p) in precoders.iter().enumerate() {
                if !PRECODER_NAMES.contains(&p.as_str()) {
                    errors.push(FieldError::new(
                        format!("precoders[{i}]"),
                        format!("unknown precoder {p:?}, expected one of {}", PRECODER_NAMES.join(", ")),
                    ));
                } else if p == "los-critical" && !matches!(channel, ChannelConfig::Los { .. }) {
                    errors.push(FieldError::new(format!("precoders[{i}]"), "los-critical needs a LOS channel"));
                } else if p == "mrt-dpd" && experiment == Experiment::Pattern {
                    errors.push(FieldError::new(format!("precoders[{i}]"), "mrt-dpd has no third-order pattern"));
                }
            }
        }

        let pattern_points = file.pattern_points.unwrap_or(z3ro::analysis::DEFAULT_PATTERN_POINTS);
        if pattern_points < 2 {
            errors.push(FieldError::new("pattern_points", "must be at least 2"));
        }
        let grid_n = file.grid_n.unwrap_or(64);
        if !(64..=512).contains(&grid_n) {
            errors.push(FieldError::new("grid_n", "must lie in [64, 512]"));
        }
        let n_symbols = file.n_symbols.unwrap_or(z3ro::analysis::DEFAULT_N_SYMBOLS);
        if n_symbols < z3ro::analysis::MIN_N_SYMBOLS {
            errors.push(FieldError::new(
                "n_symbols",
                format!("must be at least {}", z3ro::analysis::MIN_N_SYMBOLS),
            ));
        }
        let n_channels = file.n_channels.unwrap_or(20);
        if n_channels < 10 {
            errors.push(FieldError::new("n_channels", "must be at least 10"));
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self {
            experiment,
            m,
            m_s,
            saturated_set: file.saturated_set,
            channel,
            pa,
            theta_deg,
            spacing_over_lambda,
            snr_budget_db,
            backoff_grid_db,
            m_grid,
            precoders,
            pattern_points,
            grid_n,
            n_symbols,
            n_channels,
            seed: file.seed.unwrap_or(0),
            output_path: file.output_path,
        })
    }
}

/// Parses and resolves configuration text in one step.
pub fn validate(experiment: Experiment, text: &str) -> Result<ExperimentConfig, Vec<FieldError>> {
    ExperimentConfig::resolve(experiment, ConfigFile::parse(text)?)
}
