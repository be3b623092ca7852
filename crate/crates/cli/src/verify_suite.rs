//! Self-checks run by the `verify` subcommand. Every case yields a CSV row
//! with status `pass`, `fail` or `info`; the run passes iff nothing fails.

use anyhow::Result;
use serde_json::json;
use z3ro::analysis::{array_gain_penalty_db, z3ro_los_gain_factor};
use z3ro::channel::{iid_rayleigh, los_ula};
use z3ro::precoder::{
    los_critical_point, los_critical_point_for, median_gain_set, theorem1_global, theorem1_max, z3ro_heuristic,
};
use z3ro::verify::{brute_force_real, conjecture_probe, hessian_check, DEFAULT_FD_STEP};
use z3ro::{derive_stream, ChannelVector, ComplexVec, Precoder};

use crate::config::ExperimentConfig;
use crate::experiments::RunOutput;
use crate::io::table;

struct Report {
    rows: Vec<Vec<String>>,
    failures: usize,
}

impl Report {
    fn check(&mut self, suite: &str, case: String, ok: bool, value: f64) {
        if !ok {
            self.failures += 1;
        }
        let status = if ok { "pass" } else { "fail" };
        self.rows.push(vec![suite.into(), case, status.into(), value.to_string()]);
    }

    fn info(&mut self, suite: &str, case: String, value: f64) {
        self.rows.push(vec![suite.into(), case, "info".into(), value.to_string()]);
    }
}

fn null_error(p: &Precoder, h: &ChannelVector) -> Result<f64> {
    let residual = p.distortion_residual(h)?.norm();
    Ok(residual.max((p.w.power() - 1.0).abs()))
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut rep = Report { rows: Vec::new(), failures: 0 };
    let seed = cfg.seed;

    let penalty = array_gain_penalty_db(64, 1)?;
    let z3ro_db = 10.0 * (64.0 * z3ro_los_gain_factor(64, 1)?).log10();
    rep.check("closed-form", "M=64 Z3RO gain 16.45 dB".into(), (z3ro_db - 16.45).abs() <= 0.01, z3ro_db);
    let penalties: Vec<f64> = (3..=12).map(|k| array_gain_penalty_db(1 << k, 1)).collect::<z3ro::Result<_>>()?;
    let decreasing = penalties.windows(2).all(|w| w[1] < w[0]);
    rep.check("closed-form", "penalty decreasing in M".into(), decreasing, penalty);

    for (k, m) in [16usize, 32, 64].into_iter().enumerate() {
        for c in 0..10 {
            let h = iid_rayleigh(m, 1.0, derive_stream(seed, format!("verify-null-{k}-{c}")))?;
            let mut worst = 0.0f64;
            for m_s in 1..=3 {
                let p = z3ro_heuristic(&h, &median_gain_set(&h.magnitudes(), m_s))?;
                worst = worst.max(null_error(&p, &h)?);
            }
            if let Ok(p) = theorem1_global(&h) {
                worst = worst.max(null_error(&p, &h)?);
            }
            rep.check("null", format!("rayleigh M={m} draw {c}"), worst < 1e-10, worst);
        }
        let h = los_ula(m, 1.0, cfg.theta_rad(), cfg.spacing_over_lambda)?;
        let p = los_critical_point_for(&h, 2)?;
        let err = null_error(&p, &h)?;
        rep.check("null", format!("los-critical M={m}"), err < 1e-10, err);
    }

    for m in [3usize, 9, 33] {
        let h = los_ula(m, 1.0, cfg.theta_rad(), cfg.spacing_over_lambda)?;
        let p = theorem1_max(&h, 0)?.ok_or_else(|| anyhow::anyhow!("no maximum on LOS M={m}"))?;
        let c = ((m - 1) as f64).cbrt();
        let u = (c + 1.0) / (c - 1.0);
        let xi = u * u - 1.0;
        let err = (p.xi.unwrap_or(f64::NAN) - xi).abs() / xi;
        rep.check("los-consistency", format!("xi M={m}"), err < 1e-9, err);
        let reference = los_critical_point_for(&h, 1)?;
        let gap = (p.array_gain(&h)? - reference.array_gain(&h)?).abs();
        rep.check("los-consistency", format!("array gain M={m}"), gap < 1e-9, gap);
    }

    for c in 0..10u64 {
        let m = 3 + (c as usize % 3);
        let h = iid_rayleigh(m, 1.0, derive_stream(seed, format!("verify-oracle-{c}")))?;
        let r = h.magnitudes();
        let oracle = brute_force_real(&r, cfg.grid_n)?;
        let negatives = oracle.best_g.iter().filter(|&&g| g < 0.0).count();
        rep.check("oracle", format!("M={m} draw {c} one negative gain"), negatives == 1, negatives as f64);
        match theorem1_global(&h) {
            Ok(p) => {
                let gain = p.array_gain(&h)?;
                let rel = (gain - oracle.best_array_gain).abs() / oracle.best_array_gain;
                rep.check("oracle", format!("M={m} draw {c} line search vs brute force"), rel < 1e-3, rel);
            }
            Err(z3ro::Error::Infeasible) => rep.info("oracle", format!("M={m} draw {c} no line-search maximum"), 0.0),
            Err(e) => return Err(e.into()),
        }
    }

    for c in 0..5 {
        let h = iid_rayleigh(6, 1.0, derive_stream(seed, format!("verify-hessian-{c}")))?;
        let Ok(p) = theorem1_global(&h) else {
            rep.info("hessian", format!("M=6 draw {c} no line-search maximum"), 0.0);
            continue;
        };
        let s = hessian_check(&h.magnitudes(), &p.real_gains(&h), DEFAULT_FD_STEP)?;
        let ratio = s.max_eigenvalue / s.min_eigenvalue.abs();
        rep.check("hessian", format!("M=6 draw {c} maximum is NSD"), ratio <= 1e-4, ratio);
    }
    let h = ChannelVector::explicit(ComplexVec::from_real(&[1.0; 8])?);
    let p = los_critical_point(8, 2, 1.0)?;
    let s = hessian_check(&h.magnitudes(), &p.real_gains(&h), DEFAULT_FD_STEP)?;
    let ratio = s.max_eigenvalue / s.min_eigenvalue.abs();
    rep.check("hessian", "M=8 M_s=2 point has a positive eigenvalue".into(), ratio > 1e-3, ratio);

    let probe = conjecture_probe(&[1.0; 4], 20, derive_stream(seed, "verify-probe"))?;
    rep.info("probe", "LOS M=4 complex vs real relative gap".into(), probe.relative_gap.unwrap_or(f64::NAN));

    let failures = rep.failures;
    let csv = table(&["suite", "case", "status", "value"], rep.rows)?;
    let mut out = RunOutput::new(csv, json!({ "failures": failures }));
    out.passed = failures == 0;
    Ok(out)
}
