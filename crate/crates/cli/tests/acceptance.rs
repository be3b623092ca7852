//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use z3ro::analysis::{array_gain_penalty_db, pattern_point, radiation_pattern, uniform_grid};
use z3ro::channel::{iid_rayleigh, los_ula};
use z3ro::precoder::{
    los_critical_point, los_critical_point_for, median_gain_set, mrt, theorem1_all, theorem1_global, theorem1_max,
    z3ro_heuristic,
};
use z3ro::verify::{brute_force_real, hessian_check, DEFAULT_FD_STEP};
use z3ro::{derive_stream, linear_to_db, ChannelVector, Complex64, ComplexVec, Precoder};
use z3ro_cli::{run_with_threads, sidecar, validate, Experiment};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn db(x: f64) -> f64 {
    linear_to_db(x)
}

/// Closed-form LOS gain factor, written out independently of the library.
fn los_factor(m: usize, m_s: usize) -> f64 {
    let z = m_s as f64 / m as f64;
    let a = z.powf(2.0 / 3.0) - (1.0 - z).powf(2.0 / 3.0);
    a * a / (z.cbrt() + (1.0 - z).cbrt())
}

fn c1_closed_form_gain() -> Outcome {
    let h = los_ula(64, 1.0, 80f64.to_radians(), 0.5).unwrap();
    let mrt_db = db(mrt(&h).unwrap().array_gain(&h).unwrap());
    let z_db = db(los_critical_point_for(&h, 1).unwrap().array_gain(&h).unwrap());
    let penalty = mrt_db - z_db;
    let pass = (mrt_db - 18.06).abs() <= 0.01 && (z_db - 16.45).abs() <= 0.01 && (penalty - 1.61).abs() <= 0.01;
    outcome(pass, format!("MRT {mrt_db:.4} dB, Z3RO {z_db:.4} dB, penalty {penalty:.4} dB"))
}

fn c2_vanishing_penalty() -> Outcome {
    let ms: Vec<usize> = (3..=12).map(|k| 1 << k).collect();
    let p: Vec<f64> = ms.iter().map(|&m| array_gain_penalty_db(m, 1).unwrap()).collect();
    let decreasing = p.windows(2).all(|w| w[1] < w[0]);
    let oracle = -db(los_factor(4096, 1));
    let last = *p.last().unwrap();
    let pass = decreasing && (last - oracle).abs() < 1e-9 && (last - 0.30).abs() < 0.005;
    outcome(pass, format!("strictly decreasing: {decreasing}, penalty(4096) = {last:.4} dB (oracle {oracle:.4})"))
}

fn null_and_power(p: &Precoder, h: &ChannelVector) -> f64 {
    p.distortion_residual(h).unwrap().norm().max((p.w.power() - 1.0).abs())
}

fn c3_exact_null() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for c in 0..200u64 {
        let m = [16, 32, 64][c as usize % 3];
        let h = iid_rayleigh(m, 1.0, derive_stream(c, "acc-null")).unwrap();
        let r = h.magnitudes();
        let mut precoders = Vec::new();
        for m_s in [1, 2, m / 8] {
            precoders.push(z3ro_heuristic(&h, &median_gain_set(&r, m_s)).unwrap());
            precoders.push(z3ro_heuristic(&h, &(0..m_s).collect::<Vec<_>>()).unwrap());
        }
        precoders.extend(theorem1_all(&h).unwrap().into_iter().flatten());
        for p in &precoders {
            worst = worst.max(null_and_power(p, &h));
        }
        count += precoders.len();

        // LOS critical points only null on constant-modulus channels.
        let theta = derive_stream(c, "acc-null-angle").rng().random_range(0.0..std::f64::consts::PI);
        let hl = los_ula(m, 1.0, theta, 0.5).unwrap();
        for m_s in [1, 2, m / 8] {
            worst = worst.max(null_and_power(&los_critical_point_for(&hl, m_s).unwrap(), &hl));
            count += 1;
        }
    }
    outcome(worst < 1e-10, format!("{count} precoders, worst residual {worst:.3e}"))
}

fn c4_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad_sign = 0;
    let mut infeasible = 0;
    for c in 0..50u64 {
        let m = 3 + c as usize % 3;
        let h = iid_rayleigh(m, 1.0, derive_stream(c, "acc-oracle")).unwrap();
        let o = brute_force_real(&h.magnitudes(), 64).unwrap();
        if o.best_g.iter().filter(|&&g| g < 0.0).count() != 1 {
            bad_sign += 1;
        }
        match theorem1_global(&h) {
            Ok(p) => {
                let g = p.array_gain(&h).unwrap();
                worst = worst.max((g - o.best_array_gain).abs() / o.best_array_gain);
            }
            Err(_) => infeasible += 1,
        }
    }
    let pass = worst <= 1e-3 && bad_sign == 0 && infeasible == 0;
    outcome(
        pass,
        format!("worst relative gap {worst:.3e}, {bad_sign} oracle points without exactly one negative gain, {infeasible} infeasible"),
    )
}

fn c5_los_consistency() -> Outcome {
    let mut worst_xi = 0.0f64;
    let mut worst_w = 0.0f64;
    let mut xi9 = f64::NAN;
    for m in [3usize, 9, 33] {
        let h = los_ula(m, 1.0, 80f64.to_radians(), 0.5).unwrap();
        let p = theorem1_max(&h, 0).unwrap().expect("LOS maximum exists");
        let c = ((m - 1) as f64).cbrt();
        let u = (c + 1.0) / (c - 1.0);
        let xi = u * u - 1.0;
        let got = p.xi.unwrap();
        if m == 9 {
            xi9 = got;
        }
        worst_xi = worst_xi.max((got - xi).abs() / xi);
        let reference = los_critical_point_for(&h, 1).unwrap();
        let dw = p.w.iter().zip(reference.w.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst_w = worst_w.max(dw);
    }
    let pass = worst_xi <= 1e-9 && worst_w <= 1e-9;
    outcome(pass, format!("xi(M=9) = {xi9}, worst xi error {worst_xi:.3e}, worst precoder error {worst_w:.3e}"))
}

fn c6_second_order() -> Outcome {
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut n = 0;
    for c in 0..30u64 {
        let m = [4, 6, 8][c as usize % 3];
        let h = iid_rayleigh(m, 1.0, derive_stream(c, "acc-hessian")).unwrap();
        for p in theorem1_all(&h).unwrap().into_iter().flatten() {
            let s = hessian_check(&h.magnitudes(), &p.real_gains(&h), DEFAULT_FD_STEP).unwrap();
            worst_ratio = worst_ratio.max(s.max_eigenvalue / s.min_eigenvalue.abs());
            n += 1;
        }
    }
    let ones = ChannelVector::explicit(ComplexVec::from_real(&[1.0; 8]).unwrap());
    let p = los_critical_point(8, 2, 1.0).unwrap();
    let s = hessian_check(&ones.magnitudes(), &p.real_gains(&ones), DEFAULT_FD_STEP).unwrap();
    let saddle = s.max_eigenvalue > 1e-3 * s.min_eigenvalue.abs();
    let pass = n > 0 && worst_ratio <= 1e-4 && saddle;
    outcome(
        pass,
        format!(
            "{n} maxima, worst max/|min| eigenvalue {worst_ratio:.3e}; M=8 M_s=2 largest eigenvalue {:.4} (min {:.4})",
            s.max_eigenvalue, s.min_eigenvalue
        ),
    )
}

/// Back-off where `sndr` falls through `level` on its high-back-off side.
fn crossing(x: &[f64], sndr: &[f64], level: f64) -> Option<f64> {
    (0..x.len() - 1).rev().find(|&i| sndr[i] >= level && sndr[i + 1] < level).map(|i| {
        let t = (sndr[i] - level) / (sndr[i] - sndr[i + 1]);
        x[i] + t * (x[i + 1] - x[i])
    })
}

fn c7_saturation_gap() -> Outcome {
    let cfg = validate(
        Experiment::SweepBackoffFixedPpa,
        r#"{"M": 64, "M_s": 4, "channel": {"kind": "los"}, "pa": "rapp:S=2,psat=1",
            "snr_budget_db": 26, "n_symbols": 100000, "precoders": ["mrt", "z3ro"]}"#,
    )
    .unwrap();
    let out = run_with_threads(&cfg, None).unwrap();
    let mut x = Vec::new();
    let (mut mrt_sndr, mut z_sndr) = (Vec::new(), Vec::new());
    for line in out.csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let v: f64 = f[4].parse().unwrap();
        if f[1] == "mrt" {
            x.push(f[0].parse::<f64>().unwrap());
            mrt_sndr.push(v);
        } else {
            z_sndr.push(v);
        }
    }
    let i = x.iter().enumerate().min_by(|a, b| (a.1 + 2.4).abs().total_cmp(&(b.1 + 2.4).abs())).unwrap().0;
    let gap = z_sndr[i] - mrt_sndr[i];
    let linear_ok = mrt_sndr[0] > z_sndr[0];
    let h_gap = match (crossing(&x, &mrt_sndr, 15.0), crossing(&x, &z_sndr, 15.0)) {
        (Some(a), Some(b)) => b - a,
        _ => f64::NAN,
    };
    let pass = (gap - 2.0).abs() <= 0.5 && linear_ok && (h_gap - 1.5).abs() <= 0.5;
    outcome(
        pass,
        format!(
            "at {:.2} dB: SNDR MRT {:.3}, Z3RO {:.3}, gap {gap:.3} dB; at {} dB MRT {:.3} > Z3RO {:.3}: {linear_ok}; back-off gap at 15 dB SNDR {h_gap:.3} dB",
            x[i], mrt_sndr[i], z_sndr[i], x[0], mrt_sndr[0], z_sndr[0]
        ),
    )
}

fn c8_pattern() -> Outcome {
    let (m, d, theta) = (32, 0.5, 80f64.to_radians());
    let a3 = Complex64::new(-0.05, 0.0);
    let h = los_ula(m, 1.0, theta, d).unwrap();
    let grid = uniform_grid(2048);
    let nearest = grid.iter().enumerate().min_by(|a, b| (a.1 - theta).abs().total_cmp(&(b.1 - theta).abs())).unwrap().0;

    let w_mrt = mrt(&h).unwrap();
    let pat = radiation_pattern(&w_mrt, a3, 1.0, d, &grid).unwrap();
    let peak = pat.iter().map(|s| s.distortion_power).fold(0.0, f64::max);
    let mrt_peak_ok = pat[nearest].distortion_power >= peak * (1.0 - 1e-12);

    let w1 = los_critical_point_for(&h, 1).unwrap();
    let pat1 = radiation_pattern(&w1, a3, 1.0, d, &grid).unwrap();
    let peak1 = pat1.iter().map(|s| s.distortion_power).fold(0.0, f64::max);
    let at_user = pattern_point(&w1, a3, 1.0, d, theta).1;
    let depth = if at_user > 0.0 { db(peak1 / at_user) } else { f64::INFINITY };

    let w8 = los_critical_point_for(&h, 8).unwrap();
    let pat8 = radiation_pattern(&w8, a3, 1.0, d, &grid).unwrap();
    let total = |p: &[z3ro::analysis::PatternSample]| -> f64 {
        grid.windows(2).zip(p.windows(2)).map(|(g, s)| 0.5 * (g[1] - g[0]) * (s[0].distortion_power + s[1].distortion_power)).sum()
    };
    let (t1, t8) = (total(&pat1), total(&pat8));
    let pass = mrt_peak_ok && depth >= 80.0 && t8 < t1;
    outcome(
        pass,
        format!(
            "MRT distortion peak at grid point {:.3} deg: {mrt_peak_ok}; Z3RO null depth {depth:.1} dB; total distortion M_s=8 {t8:.4e} < M_s=1 {t1:.4e}",
            grid[nearest].to_degrees()
        ),
    )
}

fn c9_rayleigh_vs_los() -> Outcome {
    let (m, m_s) = (1024, 16);
    let set: Vec<usize> = (0..m_s).collect();
    let reference = m as f64 * los_factor(m, m_s);
    let ratios: Vec<f64> = (0..20u64)
        .map(|seed| {
            let h = iid_rayleigh(m, 1.0, derive_stream(seed, "acc-prop")).unwrap();
            z3ro_heuristic(&h, &set).unwrap().array_gain(&h).unwrap() / reference
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    outcome((0.95..=1.05).contains(&mean), format!("mean SNR ratio {mean:.4} over {} seeds", ratios.len()))
}

fn c10_heuristic() -> Outcome {
    let mut penalties: Vec<f64> = Vec::new();
    let mut infeasible = 0;
    for c in 0..100u64 {
        let h = iid_rayleigh(64, 1.0, derive_stream(c, "acc-heuristic")).unwrap();
        let heur = z3ro_heuristic(&h, &median_gain_set(&h.magnitudes(), 1)).unwrap().array_gain(&h).unwrap();
        match theorem1_global(&h) {
            Ok(p) => penalties.push(db(p.array_gain(&h).unwrap() / heur)),
            Err(_) => infeasible += 1,
        }
    }
    penalties.sort_by(f64::total_cmp);
    let n = penalties.len();
    let median = if n % 2 == 1 { penalties[n / 2] } else { 0.5 * (penalties[n / 2 - 1] + penalties[n / 2]) };
    outcome(median <= 0.5, format!("median penalty {median:.4} dB over {n} channels ({infeasible} infeasible)"))
}

fn c11_determinism() -> Outcome {
    let configs: [(Experiment, &str); 7] = [
        (Experiment::ArrayGain, "{}"),
        (Experiment::Pattern, r#"{"pattern_points": 256}"#),
        (Experiment::CompareMaxima, r#"{"M": 24, "seed": 3}"#),
        (Experiment::SweepBackoffFixedPpa, r#"{"M": 16, "M_s": 2, "backoff_grid_db": [-6, -3, 0], "n_symbols": 5000, "precoders": ["mrt", "z3ro", "max-global", "mrt-dpd"]}"#),
        (Experiment::SweepBackoffFixedPsat, r#"{"M": 16, "M_s": 2, "channel": {"kind": "rayleigh"}, "backoff_grid_db": [-6, 0], "n_symbols": 5000}"#),
        (Experiment::ErgodicRate, r#"{"M": 8, "M_s": 1, "backoff_grid_db": [-4, 0], "n_symbols": 2000, "n_channels": 10, "seed": 11}"#),
        (Experiment::Verify, r#"{"seed": 2}"#),
    ];
    let mut mismatches = Vec::new();
    for (exp, text) in configs {
        let cfg = validate(exp, text).unwrap();
        let runs: Vec<(String, String)> = [1, 8, 1]
            .into_iter()
            .map(|t| {
                let out = run_with_threads(&cfg, Some(t)).unwrap();
                (out.csv.clone(), sidecar(&cfg, &out).to_string())
            })
            .collect();
        if runs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(exp.name());
        }
    }
    let detail = if mismatches.is_empty() {
        "7 experiments byte-identical at 1 and 8 threads".to_string()
    } else {
        format!("differing outputs: {}", mismatches.join(", "))
    };
    outcome(mismatches.is_empty(), detail)
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria: [Criterion; 11] = [
        (1, "closed-form array gain", secs(1), c1_closed_form_gain),
        (2, "vanishing penalty", secs(1), c2_vanishing_penalty),
        (3, "exact distortion null", secs(5), c3_exact_null),
        (4, "line search vs brute force", secs(120), c4_oracle),
        (5, "LOS consistency", None, c5_los_consistency),
        (6, "second-order conditions", secs(30), c6_second_order),
        (7, "saturation-regime SNDR gap", secs(300), c7_saturation_gap),
        (8, "radiation patterns", secs(30), c8_pattern),
        (9, "Rayleigh vs LOS SNR", secs(60), c9_rayleigh_vs_los),
        (10, "heuristic near-optimality", secs(120), c10_heuristic),
        (11, "determinism", None, c11_determinism),
    ];
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let pass = o.pass && limit.is_none_or(|l| elapsed <= l);
        if !pass {
            failed += 1;
        }
        let limit = limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        println!(
            "criterion {n:>2} {}: {name}: {} ({:.2} s{limit})",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
