use std::process::Command;

use z3ro_cli::{validate, Experiment};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_z3ro"))
}

#[test]
fn invalid_config_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"M": 8, "M_s": 4}"#).unwrap();
    let out = bin().args(["sweep-backoff", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("M_s: saturated set must satisfy 0 < M_s < M/2"), "{err}");
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"seeds": 3}"#).unwrap();
    let out = bin().arg("array-gain").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn array_gain_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gain.csv");
    let status = bin().args(["array-gain", "--out"]).arg(&csv).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("M,M_s,mrt_gain_db,z3ro_gain_db,penalty_db\n"));
    assert_eq!(text.lines().count(), 11);
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gain.csv.json")).unwrap()).unwrap();
    assert_eq!(side["experiment"], "array-gain");
    assert_eq!(side["config"]["seed"], 0);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"seed": 5, "M": 16, "M_s": 2}"#).unwrap();
    let csv = dir.path().join("o.csv");
    let status = bin()
        .args(["compare-maxima", "--seed", "9", "--antennas", "12", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let side: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o.csv.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["seed"], 9);
    assert_eq!(side["config"]["M"], 12);
    assert_eq!(side["config"]["M_s"], 2);
}

#[test]
fn channel_file_and_precoder_export() {
    let dir = tempfile::tempdir().unwrap();
    let chan = dir.path().join("h.csv");
    std::fs::write(&chan, "index,re,im\n0,1,0\n1,0.5,0.5\n2,-0.3,0.9\n3,0.2,-1.1\n4,0.8,0.1\n").unwrap();
    let pre = dir.path().join("w.csv");
    let out = bin()
        .arg("compare-maxima")
        .arg("--channel-file")
        .arg(&chan)
        .arg("--precoder-out")
        .arg(&pre)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(table.lines().count(), 6);
    assert!(table.lines().any(|l| l.contains(",true,")));
    let w = std::fs::read_to_string(&pre).unwrap();
    assert!(w.starts_with("index,re,im,is_saturated\n"));
    assert_eq!(w.lines().filter(|l| l.ends_with(",true")).count(), 1);
}

#[test]
fn channel_file_length_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let chan = dir.path().join("h.csv");
    std::fs::write(&chan, "index,re,im\n0,1,0\n1,1,0\n2,1,0\n").unwrap();
    let out = bin().args(["compare-maxima", "--antennas", "4", "--channel-file"]).arg(&chan).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("suite,case,status,value\n"));
    assert!(!csv.contains(",fail,"));
}

#[test]
fn sweep_has_row_per_point_and_precoder() {
    let cfg = validate(
        Experiment::SweepBackoffFixedPpa,
        r#"{"M": 3, "M_s": 1, "channel": {"kind": "los"}, "precoders": ["mrt", "max-global"],
            "backoff_grid_db": [-5.0], "n_symbols": 2000}"#,
    )
    .unwrap();
    let out = z3ro_cli::run(&cfg).unwrap();
    let rows: Vec<&str> = out.csv.lines().collect();
    assert_eq!(rows[0], "x_value_db,precoder,snr_db,sdr_db,sndr_db,rate_bps");
    assert_eq!(rows.len(), 3);
}
