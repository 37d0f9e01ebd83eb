use std::ffi::OsString;
use std::fs;
use std::path::Path;
use std::process::Command;

use beating_lab::cli::main_with;
use beating_lab::formats::{read_csv, DiagnosticRow, LevelRow, OrbitRow};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv: Vec<OsString> = vec!["beating".into(), "--out".into(), dir.into()];
    argv.extend(args.iter().map(OsString::from));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(dir: &Path, args: &[&str]) -> Value {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let (code, out, err) = run(dir, &a);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn resonances_small_bounds() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["resonances", "--bound", "2"]);
    assert_eq!(r["resonant_sets"].as_array().unwrap().len(), 1);
    assert_eq!(r["resonant_sets"][0]["n"], -2);
    let r = run_json(dir.path(), &["resonances", "--bound", "1"]);
    assert!(r["resonant_sets"].as_array().unwrap().is_empty());
    assert_eq!(r["resonance_count"], 0);
    assert!(dir.path().join("resonances.json").exists());
}

#[test]
fn resonances_recognises_set() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["resonances", "--bound", "2", "--set=-2,1,2,-1"]);
    assert_eq!(r["query"]["set"]["n"], -2);
    assert_eq!(r["query"]["set"]["k"], 1);
    let r = run_json(dir.path(), &["resonances", "--bound", "2", "--set", "0,1,2,3"]);
    assert!(r["query"]["set"].is_null());
}

#[test]
fn normalform_known_inventories() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["normalform", "--set=-2,1,2,-1", "--bound", "6", "--samples", "10"]);
    assert_eq!(r["counts"]["z1"], 0);
    assert_eq!(r["ze_coefficients"], serde_json::json!([9, 9]));
    assert_eq!(r["z2_matches_partner_pairs"], true);
    let inv: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("normalform.json")).unwrap()).unwrap();
    let mut mult: Vec<u64> = inv["z2"].as_array().unwrap().iter().map(|t| t["multiplicity"].as_u64().unwrap()).collect();
    mult.sort();
    mult.dedup();
    assert_eq!(mult, [9, 36]);

    let r = run_json(dir.path(), &["normalform", "--set=-1,1,5,7", "--bound", "12", "--samples", "5"]);
    assert_eq!(r["z1_empty"], true);
    assert_eq!(r["z2_matches_partner_pairs"], true);
    for key in ["max_rel_error_z4", "max_rel_error_w4k", "max_rel_error_z6i", "max_rel_error_split"] {
        assert!(r[key].as_f64().unwrap() < 1e-10, "{key}");
    }
}

#[test]
fn model_period_and_portrait() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["model", "--A", "0.5", "--K0", "0.3", "--period", "--portrait"]);
    assert!((r["k_at_half_period"].as_f64().unwrap() - 0.7).abs() < 1e-6);
    assert_eq!(r["separatrix_through_kappa_star"], true);
    let orbit: Vec<OrbitRow> = read_csv(&dir.path().join("orbit.csv")).unwrap();
    assert!(orbit.len() > 100);
    let h0 = orbit[0].h;
    assert!(orbit.iter().all(|o| (o.h - h0).abs() < 1e-9));
    let sep: Vec<LevelRow> = read_csv(&dir.path().join("separatrix.csv")).unwrap();
    assert!(sep.iter().any(|p| p.phi.abs() < 1e-12 && (p.k - 0.207988904229).abs() < 1e-9));

    let r = run_json(dir.path(), &["model", "--gamma", "0.05", "--period"]);
    assert_eq!(r["A"], 4.0);
    assert!(r["k_at_half_period"].as_f64().unwrap() > 0.1);
}

#[test]
fn model_rejects_bad_regime() {
    let dir = TempDir::new().unwrap();
    let (code, _, err) = run(dir.path(), &["model", "--A", "0.2", "--K0", "0.3"]);
    assert_ne!(code, 0);
    assert!(err.contains("error"));
}

#[test]
fn simulate_free_flow_is_flat() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["simulate", "--nu", "0", "--t-end", "3", "--n-modes", "16"]);
    assert_eq!(r["t_end"], 3.0);
    let rows: Vec<DiagnosticRow> = read_csv(&dir.path().join("diagnostics.csv")).unwrap();
    for row in &rows {
        assert_eq!(row.i_a1, rows[0].i_a1);
        assert_eq!(row.i_b2, rows[0].i_b2);
    }
    let snap: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("snapshot.json")).unwrap()).unwrap();
    assert_eq!(snap["t"], 3.0);
}

#[test]
fn simulate_excitation_crosses_threshold() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["simulate", "--theorem", "2", "--nu", "0.01"]);
    assert!(r["max_i_a1"].as_f64().unwrap() > 0.1);
}

#[test]
fn simulate_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        run_json(d.path(), &["simulate", "--nu", "0.04", "--t-end", "5"]);
    }
    let read = |d: &TempDir| fs::read(d.path().join("diagnostics.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn verify_reports_and_rejects_zero_nu() {
    let dir = TempDir::new().unwrap();
    let r = run_json(dir.path(), &["verify", "--nus", "0.04,0.01"]);
    assert_eq!(r["verdict"]["monotone_deviation"], true);
    assert_eq!(r["runs"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("verify_report.json").exists());

    let (code, _, err) = run(dir.path(), &["verify", "--nus", "0.01,0"]);
    assert_ne!(code, 0);
    assert!(err.contains("nu must be positive"));
}

#[test]
fn verify_failing_verdict_exits_nonzero() {
    let dir = TempDir::new().unwrap();
    // a single coarse step size breaks conservation
    let (code, out, _) = run(dir.path(), &["verify", "--nus", "0.04", "--dt", "0.05"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"json": true, "bound": 1, "set": [-2, 1, 2, -1], "unknown_key": 3}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, err) = run(dir.path(), &["--config", cfg, "resonances"]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["bound"], 1);
    assert_eq!(r["query"]["set"]["k"], 1);

    let (code, out, _) = run(dir.path(), &["--config", cfg, "resonances", "--bound", "2"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["bound"], 2);
    assert_eq!(r["resonance_count"], 1);
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bin = env!("CARGO_BIN_EXE_beating");
    let ok = Command::new(bin).args(["--out"]).arg(dir.path()).args(["resonances", "--bound", "3"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("closure: true"));
    let bad = Command::new(bin).args(["normalform", "--set", "1,2,3,4"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let usage = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
