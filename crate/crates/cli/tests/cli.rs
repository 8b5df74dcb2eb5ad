use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const WITNESS: &str = r#"{
  "n": 3,
  "target": "w_state",
  "reference": "css",
  "rho_star": {"thermal": {"B": 0.5, "Jz": 0.0, "T": 0.01}}
}"#;

const SMALL_SWEEP: &str = r#"{
  "n": 3,
  "B": {"min": 0.0, "max": 1.0, "step": 0.25},
  "Jz": {"min": 0.0, "max": 1.0, "step": 0.5},
  "T": {"min": 0.01, "max": 1.0, "step": 0.1}
}"#;

const PROTOCOL: &str = r#"{"n": 3, "T": 0.01, "initial": "css_thermal", "final": {"B": 0.5, "Jz": 0.0}}"#;

fn entwit(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_entwit"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .env_remove("ENTWIT_WORKERS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join("out").join(name)).unwrap()
}

fn embedded_config(dir: &Path, name: &str) -> String {
    let v: serde_json::Value = serde_json::from_slice(&read(dir, name)).unwrap();
    v["config"].to_string()
}

fn tmp() -> TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn witness_detects_cold_final_state() {
    let d = tmp();
    let o = entwit(d.path(), WITNESS, &["witness"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&read(d.path(), "witness.json")).unwrap();
    assert_eq!(v["report"]["detected"], true);
    assert!((v["report"]["s_left"].as_f64().unwrap() - 2.25f64.ln()).abs() < 1e-9);
}

#[test]
fn witness_not_detected_exits_3() {
    let d = tmp();
    let cfg = r#"{"n": 3, "rho_star": {"thermal": {"B": 0.5, "Jz": 0.0, "T": 1e6}}}"#;
    assert_eq!(code(&entwit(d.path(), cfg, &["witness"])), 3);
    let d = tmp();
    assert_eq!(code(&entwit(d.path(), r#"{"n": 3, "rho_star": "completely_mixed"}"#, &["witness"])), 3);
}

#[test]
fn via_work_route_agrees() {
    let cfg = r#"{"n": 3, "target": {"thermal": {"B": 0.5, "Jz": 0.0, "T": 0.01}}, "reference": "css_thermal",
        "rho_star": {"thermal": {"B": 0.45, "Jz": 0.05, "T": 0.02}}}"#;
    let margin = |route: &str| {
        let d = tmp();
        let o = entwit(d.path(), cfg, &["--route", route, "witness"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_slice(&read(d.path(), "witness.json")).unwrap();
        assert_eq!(v["config"]["route"], route);
        v["report"]["margin"].as_f64().unwrap()
    };
    assert!((margin("direct") - margin("via-work")).abs() < 1e-6);
}

#[test]
fn missing_n_is_line_anchored() {
    let d = tmp();
    let cfg = "{\n  \"target\": \"w_state\",\n  \"rho_star\": \"css\"\n}\n";
    let o = entwit(d.path(), cfg, &["witness"]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert!(err.contains("config.json:4:1"), "{err}");
    assert!(err.contains("missing field `n`"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let d = tmp();
    let cfg = r#"{"n": 3, "rho_star": "css", "temprature": 0.1}"#;
    let o = entwit(d.path(), cfg, &["witness"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown field `temprature`"));
}

#[test]
fn zero_size_axis_is_a_config_error() {
    let d = tmp();
    let cfg = r#"{"n": 3, "B": {"min": 0.0, "max": 1.0, "step": 0.0}}"#;
    assert_eq!(code(&entwit(d.path(), cfg, &["sweep"])), 1);
}

#[test]
fn missing_config_flag_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_entwit")).arg("verify").output().unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn sweep_writes_csv_and_header() {
    let d = tmp();
    let o = entwit(d.path(), SMALL_SWEEP, &["sweep"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(read(d.path(), "sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config: {"));
    assert_eq!(lines[1], "B,Jz,T,s_left,s_right,margin,detected");
    assert_eq!(lines.len(), 2 + 5 * 3 * 10);

    let header: serde_json::Value = serde_json::from_slice(&read(d.path(), "sweep.json")).unwrap();
    assert_eq!(header["grid"]["points"], 150);
    assert_eq!(header["sha256"]["target"].as_str().unwrap().len(), 64);
    assert!(header["detected"].as_u64().unwrap() > 0);
}

#[test]
fn sweep_bytes_identical_across_worker_counts() {
    let run = |workers: &str| {
        let d = tmp();
        let o = entwit(d.path(), SMALL_SWEEP, &["--workers", workers, "sweep"]);
        assert_eq!(code(&o), 0);
        (read(d.path(), "sweep.csv"), read(d.path(), "sweep.json"))
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("8"));
}

#[test]
fn workers_fall_back_to_environment() {
    let d = tmp();
    let path = d.path().join("config.json");
    fs::write(&path, SMALL_SWEEP).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_entwit"))
        .args(["--config", path.to_str().unwrap(), "--out", d.path().join("out").to_str().unwrap(), "sweep"])
        .env("ENTWIT_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("at least 1"));
}

#[test]
fn verify_three_site_protocol_passes() {
    let d = tmp();
    let o = entwit(d.path(), &format!(r#"{{"protocol": {PROTOCOL}}}"#), &["verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&read(d.path(), "verify.json")).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["unitary"], "exact");
    assert!(v["max_relative_deviation"].as_f64().unwrap() <= 1e-8);
}

fn write_matrix(dir: &Path, scale: f64) -> PathBuf {
    let d = 8;
    let re: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { scale } else { 0.0 }).collect())
        .collect();
    let im = vec![vec![0.0; d]; d];
    let path = dir.join("u.json");
    fs::write(&path, serde_json::json!({"n": 3, "re": re, "im": im}).to_string()).unwrap();
    path
}

#[test]
fn non_unitary_file_fails_verify_with_exit_2() {
    let d = tmp();
    write_matrix(d.path(), 1.1);
    let cfg = r#"{"protocol": {"n": 3, "initial": "css_thermal", "final": {"B": 0.5, "Jz": 0.0}, "unitary_file": "u.json"}}"#;
    let o = entwit(d.path(), cfg, &["verify"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unitarity"), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&read(d.path(), "verify.json")).unwrap();
    assert_eq!(v["checks"][0]["name"], "unitarity");
    assert_eq!(v["checks"][0]["status"], "fail");
}

#[test]
fn unitary_file_identity_passes() {
    let d = tmp();
    write_matrix(d.path(), 1.0);
    let cfg = r#"{"protocol": {"n": 3, "initial": "css_thermal", "final": {"B": 0.5, "Jz": 0.0}, "unitary_file": "u.json"}}"#;
    let o = entwit(d.path(), cfg, &["verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn non_unitary_file_fails_sample_with_exit_2() {
    let d = tmp();
    write_matrix(d.path(), 1.1);
    let cfg = r#"{"protocol": {"n": 3, "initial": "css_thermal", "final": {"B": 0.5, "Jz": 0.0}, "unitary_file": "u.json"}, "count": 10}"#;
    let o = entwit(d.path(), cfg, &["sample"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unitarity"));
}

#[test]
fn single_sample_gives_single_row() {
    let d = tmp();
    let o = entwit(d.path(), &format!(r#"{{"protocol": {PROTOCOL}, "count": 1, "seed": 3}}"#), &["sample"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = String::from_utf8(read(d.path(), "sample.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1], "n_index,m_index,E_i,E_f,work,generalized_exponent");
    assert_eq!(lines[2].split(',').count(), 6);
    let v: serde_json::Value = serde_json::from_slice(&read(d.path(), "sample.json")).unwrap();
    assert!(v["summary"]["stderr"].is_null());
}

#[test]
fn sample_is_deterministic() {
    let cfg = format!(r#"{{"protocol": {PROTOCOL}, "count": 20000}}"#);
    let run = |args: &[&str]| {
        let d = tmp();
        let o = entwit(d.path(), &cfg, args);
        assert_eq!(code(&o), 0);
        (read(d.path(), "sample.csv"), read(d.path(), "sample.json"))
    };
    let a = run(&["--seed", "11", "--workers", "1", "sample"]);
    assert_eq!(a, run(&["--seed", "11", "--workers", "4", "sample"]));
    assert_ne!(a.0, run(&["--seed", "12", "sample"]).0);

    let v: serde_json::Value = serde_json::from_slice(&a.1).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert!(v["summary"]["z_score"].as_f64().unwrap().abs() < 5.0);
}

#[test]
fn embedded_config_reproduces_outputs() {
    for (verb, cfg, file) in [
        ("witness", WITNESS.to_string(), "witness.json"),
        ("sweep", SMALL_SWEEP.to_string(), "sweep.json"),
        ("verify", format!(r#"{{"protocol": {PROTOCOL}, "random_unitaries": 3}}"#), "verify.json"),
        ("sample", format!(r#"{{"protocol": {PROTOCOL}, "count": 500, "seed": 5}}"#), "sample.json"),
    ] {
        let first = tmp();
        assert!(code(&entwit(first.path(), &cfg, &[verb])) != 1);
        let again = tmp();
        let resolved = embedded_config(first.path(), file);
        assert!(code(&entwit(again.path(), &resolved, &[verb])) != 1);
        assert_eq!(read(first.path(), file), read(again.path(), file), "{verb}");
    }
}
