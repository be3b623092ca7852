//! One function per experiment; each returns its CSV text and a JSON summary.

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use z3ro::analysis::{
    achievable_rate, bussgang_metrics, ergodic_rate, radiation_pattern, uniform_grid, z3ro_los_gain_factor,
    BackoffMode, ChannelSpec, LinkSetup, PrecoderChoice,
};
use z3ro::precoder::{median_gain_set, theorem1_all, z3ro_heuristic};
use z3ro::{derive_stream, linear_to_db, ChannelVector, PaModel, Precoder};

use crate::config::{ChannelConfig, Experiment, ExperimentConfig};
use crate::io::{read_channel_csv, table};
use crate::verify_suite;

pub const SWEEP_COLUMNS: [&str; 6] = ["x_value_db", "precoder", "snr_db", "sdr_db", "sndr_db", "rate_bps"];

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub summary: Value,
    /// False only when a verification suite failed.
    pub passed: bool,
    /// Extra precoder to export, when the experiment produces one.
    pub precoder: Option<Precoder>,
}

impl RunOutput {
    pub(crate) fn new(csv: String, summary: Value) -> Self {
        Self { csv, summary, passed: true, precoder: None }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::ArrayGain => array_gain(cfg),
        Experiment::Pattern => pattern(cfg),
        Experiment::CompareMaxima => compare_maxima(cfg),
        Experiment::SweepBackoffFixedPpa => sweep(cfg, BackoffMode::FixedPpa),
        Experiment::SweepBackoffFixedPsat => sweep(cfg, BackoffMode::FixedPsat),
        Experiment::ErgodicRate => rate(cfg),
        Experiment::Verify => verify_suite::run(cfg),
    }
}

/// Runs on a dedicated pool of `threads` workers when given.
pub fn run_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput> {
    match threads {
        None => run(cfg),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| run(cfg)),
    }
}

fn channel_spec(cfg: &ExperimentConfig) -> Result<ChannelSpec> {
    Ok(match &cfg.channel {
        ChannelConfig::Los { beta } => ChannelSpec::Los {
            beta: *beta,
            theta_rad: cfg.theta_rad(),
            spacing_over_lambda: cfg.spacing_over_lambda,
        },
        ChannelConfig::Rayleigh { beta } => ChannelSpec::Rayleigh { beta: *beta },
        ChannelConfig::File { path } => ChannelSpec::Explicit(read_channel_csv(path)?),
    })
}

fn draw_channel(cfg: &ExperimentConfig, spec: &ChannelSpec) -> Result<ChannelVector> {
    Ok(spec.draw(cfg.m, derive_stream(cfg.seed, "channel"))?)
}

fn choice(cfg: &ExperimentConfig, name: &str) -> PrecoderChoice {
    match name {
        "z3ro" => match &cfg.saturated_set {
            Some(set) => PrecoderChoice::Z3roSet(set.clone()),
            None => PrecoderChoice::Z3ro { m_s: cfg.m_s },
        },
        "los-critical" => PrecoderChoice::LosCritical { m_s: cfg.m_s },
        "max-global" => PrecoderChoice::Theorem1Global,
        _ => PrecoderChoice::Mrt,
    }
}

fn db(x: f64) -> String {
    linear_to_db(x).to_string()
}

fn array_gain(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let beta = channel_spec(cfg)?.beta();
    let mut rows = Vec::with_capacity(cfg.m_grid.len());
    for &m in &cfg.m_grid {
        let mrt = m as f64 * beta;
        let z3ro = mrt * z3ro_los_gain_factor(m, cfg.m_s)?;
        rows.push(vec![m.to_string(), cfg.m_s.to_string(), db(mrt), db(z3ro), db(mrt / z3ro)]);
    }
    let csv = table(&["M", "M_s", "mrt_gain_db", "z3ro_gain_db", "penalty_db"], rows)?;
    Ok(RunOutput::new(csv, json!({})))
}

fn pattern(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let h = draw_channel(cfg, &channel_spec(cfg)?)?;
    let PaModel::ThirdOrder { a3 } = cfg.pa_model() else {
        return Err(anyhow!("pattern needs a third-order PA"));
    };
    let grid = uniform_grid(cfg.pattern_points);
    let mut rows = Vec::new();
    let mut peaks = serde_json::Map::new();
    for name in &cfg.precoders {
        let w = choice(cfg, name).build(&h)?.ok_or_else(|| anyhow!("{name} is infeasible on this channel"))?;
        let samples = radiation_pattern(&w, a3, 1.0, cfg.spacing_over_lambda, &grid)?;
        let at_user = z3ro::analysis::pattern_point(&w, a3, 1.0, cfg.spacing_over_lambda, cfg.theta_rad());
        peaks.insert(
            name.clone(),
            json!({
                "distortion_at_user": at_user.1,
                "distortion_total": samples.iter().map(|s| s.distortion_power).sum::<f64>(),
            }),
        );
        for s in samples {
            rows.push(vec![
                s.theta_tilde_rad.to_degrees().to_string(),
                name.clone(),
                s.directivity_linear_db.to_string(),
                s.directivity_distortion_db.to_string(),
            ]);
        }
    }
    let csv = table(&["theta_deg", "precoder", "linear_directivity_db", "distortion_directivity_db"], rows)?;
    Ok(RunOutput::new(csv, Value::Object(peaks)))
}

fn compare_maxima(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let h = draw_channel(cfg, &channel_spec(cfg)?)?;
    let r = h.magnitudes();
    let maxima = theorem1_all(&h)?;
    let gains: Vec<Option<f64>> = maxima
        .iter()
        .map(|p| p.as_ref().map(|p| p.array_gain(&h)).transpose())
        .collect::<z3ro::Result<_>>()?;
    let set = match &cfg.saturated_set {
        Some(s) => s.clone(),
        None => median_gain_set(&r, cfg.m_s),
    };
    let heuristic = z3ro_heuristic(&h, &set)?;
    let heuristic_gain = heuristic.array_gain(&h)?;
    let mrt_gain = h.h.power();

    // Strict comparison keeps the smallest index among ties.
    let mut global: Option<(usize, f64)> = None;
    for (i, g) in gains.iter().enumerate() {
        if let Some(g) = *g {
            if global.is_none_or(|(_, best)| g > best * (1.0 + 1e-12)) {
                global = Some((i, g));
            }
        }
    }

    let mut order: Vec<usize> = (0..r.len()).collect();
    order.sort_by(|&a, &b| r[a].total_cmp(&r[b]).then(a.cmp(&b)));
    let rows = order.iter().enumerate().map(|(rank, &i)| {
        let (xi, gain) = match (&maxima[i], gains[i]) {
            (Some(p), Some(g)) => (p.xi.map(|x| x.to_string()).unwrap_or_default(), db(g)),
            _ => (String::new(), String::new()),
        };
        vec![
            rank.to_string(),
            i.to_string(),
            db(r[i] * r[i]),
            maxima[i].is_some().to_string(),
            xi,
            gain,
            (global.map(|g| g.0) == Some(i)).to_string(),
            set.contains(&i).to_string(),
        ]
    });
    let csv = table(
        &[
            "sorted_rank",
            "antenna",
            "channel_gain_db",
            "feasible",
            "xi",
            "array_gain_db",
            "is_global_max",
            "in_heuristic_set",
        ],
        rows,
    )?;
    let summary = json!({
        "mrt_gain_db": linear_to_db(mrt_gain),
        "heuristic_gain_db": linear_to_db(heuristic_gain),
        "heuristic_set": set,
        "global_antenna": global.map(|g| g.0),
        "global_gain_db": global.map(|g| linear_to_db(g.1)),
        "heuristic_penalty_db": global.map(|g| linear_to_db(g.1 / heuristic_gain)),
        "n_infeasible": maxima.iter().filter(|p| p.is_none()).count(),
    });
    let mut out = RunOutput::new(csv, summary);
    out.precoder = global.and_then(|(i, _)| maxima[i].clone());
    Ok(out)
}

fn sweep(cfg: &ExperimentConfig, mode: BackoffMode) -> Result<RunOutput> {
    let spec = channel_spec(cfg)?;
    let h = draw_channel(cfg, &spec)?;
    let precoders: Vec<Option<Precoder>> =
        cfg.precoders.iter().map(|n| choice(cfg, n).build(&h)).collect::<z3ro::Result<_>>()?;
    let pa = cfg.pa_model();
    let beta = spec.beta();

    let rows: Vec<Vec<Vec<String>>> = cfg
        .backoff_grid_db
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let op = mode.operating_point(cfg.m, beta, cfg.snr_budget_db, x);
            let stream = derive_stream(cfg.seed, format!("symbols-{i}"));
            cfg.precoders
                .iter()
                .zip(&precoders)
                .map(|(name, w)| {
                    let mut row = vec![x.to_string(), name.clone()];
                    let Some(w) = w else {
                        row.extend(std::iter::repeat_n(String::new(), 4));
                        return Ok(row);
                    };
                    let amp = if name == "mrt-dpd" {
                        PaModel::soft_limiter(op.p_sat)?
                    } else {
                        pa.with_p_sat(op.p_sat)
                    };
                    let m = bussgang_metrics(&h, w, &amp, op.p, op.sigma_v2, cfg.n_symbols, stream)?;
                    row.extend([
                        m.snr_db().to_string(),
                        m.sdr_db().to_string(),
                        m.sndr_db().to_string(),
                        achievable_rate(m.sndr)?.to_string(),
                    ]);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let csv = table(&SWEEP_COLUMNS, rows.into_iter().flatten())?;
    let infeasible: Vec<&String> =
        cfg.precoders.iter().zip(&precoders).filter(|(_, p)| p.is_none()).map(|(n, _)| n).collect();
    Ok(RunOutput::new(csv, json!({ "infeasible_precoders": infeasible })))
}

fn rate(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let spec = channel_spec(cfg)?;
    let pa = cfg.pa_model();
    let beta = spec.beta();
    let rows: Vec<Vec<Vec<String>>> = cfg
        .backoff_grid_db
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let op = BackoffMode::FixedPpa.operating_point(cfg.m, beta, cfg.snr_budget_db, x);
            let stream = derive_stream(cfg.seed, format!("point-{i}"));
            cfg.precoders
                .iter()
                .map(|name| {
                    let amp = if name == "mrt-dpd" {
                        PaModel::soft_limiter(op.p_sat)?
                    } else {
                        pa.with_p_sat(op.p_sat)
                    };
                    let setup = LinkSetup {
                        m: cfg.m,
                        channel: spec.clone(),
                        pa: amp,
                        p: op.p,
                        sigma_v2: op.sigma_v2,
                        n_symbols: cfg.n_symbols,
                    };
                    let mut row = vec![x.to_string(), name.clone()];
                    match ergodic_rate(&setup, &choice(cfg, name), cfg.n_channels, stream) {
                        Ok(est) => row.extend([
                            est.mean_rate.to_string(),
                            est.n_channels.to_string(),
                            est.n_infeasible.to_string(),
                        ]),
                        Err(z3ro::Error::Infeasible) => {
                            row.extend([String::new(), cfg.n_channels.to_string(), cfg.n_channels.to_string()])
                        }
                        Err(e) => return Err(e.into()),
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let csv = table(&["x_value_db", "precoder", "rate_bps", "n_channels", "n_infeasible"], rows.into_iter().flatten())?;
    Ok(RunOutput::new(csv, json!({})))
}
