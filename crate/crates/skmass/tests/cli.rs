use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skmass"))
        .args(args)
        .env("SKMASS_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice::<Value>(&out.stdout).unwrap().as_array().unwrap().clone()
}

#[test]
fn basis_examples_and_cache_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(dir.path(), &["basis", "--weight", "12"]);
    let rows = json(&first);
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["dimension"], 1);
    assert_eq!(rows[0]["p"], 2);
    assert!((rows[0]["lambda_p"].as_f64().unwrap() + 0.530330).abs() < 1e-6);
    let cache_file = dir.path().join("weight-012.json");
    let cached = std::fs::read(&cache_file).unwrap();
    let second = run(dir.path(), &["basis", "--weight", "12"]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read(&cache_file).unwrap(), cached);

    let file: Value = serde_json::from_slice(&cached).unwrap();
    for key in ["weight", "precision", "dimension", "forms", "checksum"] {
        assert!(file.get(key).is_some(), "{key}");
    }
    assert_eq!(file["forms"][0][2], "-24");

    let rows = json(&run(dir.path(), &["basis", "--weight", "14"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["dimension"], 0);
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let good = run(dir.path(), &["basis", "--weight", "24"]);
    let path = dir.path().join("weight-024.json");
    let bytes = std::fs::read(&path).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap().replacen("\"1\"", "\"7\"", 1);
    std::fs::write(&path, text).unwrap();
    let again = run(dir.path(), &["basis", "--weight", "24"]);
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("checksum mismatch"));
    assert_eq!(good.stdout, again.stdout);
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = run(env_dir.path(), &["basis", "--weight", "16", "--cache-dir", flag_dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(flag_dir.path().join("weight-016.json").exists());
    assert!(!env_dir.path().join("weight-016.json").exists());
}

#[test]
fn csv_mirrors_json() {
    let dir = tempfile::tempdir().unwrap();
    let j = json(&run(dir.path(), &["trace-check", "--weight", "12", "--m-max", "3", "--n-max", "2"]));
    let c = run(dir.path(), &["trace-check", "--weight", "12", "--m-max", "3", "--n-max", "2", "--out", "csv"]);
    assert!(c.status.success());
    let text = String::from_utf8(c.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["k", "m", "n", "lhs", "rhs", "c_max", "residual", "non_real"]);
    let mut keys: Vec<&str> = j[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut sorted = header.clone();
    keys.sort();
    sorted.sort();
    assert_eq!(keys, sorted);
    for (line, row) in lines.zip(&j) {
        let cells: Vec<&str> = line.split(',').collect();
        let (x, y) = (cells[6].parse::<f64>().unwrap(), row["residual"].as_f64().unwrap());
        assert!((x - y).abs() <= 1e-15 * x.abs());
        assert!(row["residual"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["trace-check", "--weight", "13"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["mass", "--weight", "24"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["basis", "--weight", "11"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["exponents", "--delta", "0.4"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["amplify", "--weight", "30", "--amp-N", "2"]).status.code(), Some(2));
}

#[test]
fn mass_examples() {
    let dir = tempfile::tempdir().unwrap();
    let rows = json(&run(dir.path(), &["mass", "--weight", "26"]));
    assert_eq!(rows[0]["n_fg"].as_f64(), Some(0.0));
    let rows = json(&run(dir.path(), &["mass", "--weight", "22"]));
    let n = rows[0]["n_fg"].as_f64().unwrap();
    assert!((n - 0.833831806).abs() < 1e-8, "{n}");
    assert_eq!(rows[0]["f_count"], 1);
    let rows = json(&run(dir.path(), &["mass", "--weight", "24", "--allow-even"]));
    assert!(rows.iter().all(|r| r["outside_lift"] == true && r["n_fg"].as_f64() == Some(0.0)));
    let rows = json(&run(dir.path(), &["mass-average", "--weight", "18,22"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["average"].as_f64(), Some(0.0));
    assert!((rows[1]["average"].as_f64().unwrap() - 12.0 / 21.0 * n).abs() < 1e-12);
}

#[test]
fn lvalue_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = json(&run(dir.path(), &["lvalue", "--weight", "22"]));
    assert_eq!(rows.len(), 1);
    assert!((rows[0]["value"].as_f64().unwrap() - 0.70152373050).abs() < 1e-9);
    let moved = json(&run(dir.path(), &["lvalue", "--weight", "22", "--sigma", "2"]));
    assert!((moved[0]["value"].as_f64().unwrap() - rows[0]["value"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn amplify_and_scans() {
    let dir = tempfile::tempdir().unwrap();
    let rows = json(&run(dir.path(), &["amplify", "--weight", "30", "--amp-N", "100"]));
    assert_eq!(rows[0]["holds"], true);
    assert!(rows[0]["lhs"].as_f64().unwrap() <= rows[0]["rhs"].as_f64().unwrap());
    assert_eq!(rows[0]["prime_count"], 4);

    let rows = json(&run(dir.path(), &["bn-scan", "--weight", "14", "--amp-N", "100,10000"]));
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r["value"].as_f64() == Some(0.0)));

    let rows = json(&run(dir.path(), &["bn-scan", "--weight", "30", "--amp-N", "100,10000,1000000"]));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[1]["variant"], "epsilon");
}

#[test]
fn exponents_and_job_independence() {
    let dir = tempfile::tempdir().unwrap();
    let rows = json(&run(dir.path(), &["exponents"]));
    let get = |name: &str| rows.iter().find(|r| r["name"] == name).unwrap()["value"].as_f64().unwrap();
    assert!((get("bound_exponent") - (1.0 - 1.0 / 210.0)).abs() < 2e-4);
    assert!(get("delta3") > 1.0 / 210.0 && get("delta3") < 1.0 / 209.0);

    let a = run(dir.path(), &["trace-check", "--weight", "24", "--m-max", "4", "--n-max", "4", "--jobs", "1"]);
    let b = run(dir.path(), &["trace-check", "--weight", "24", "--m-max", "4", "--n-max", "4", "--jobs", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
