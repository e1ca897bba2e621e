use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str], config: &Value) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, serde_json::to_string_pretty(config).unwrap()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cvs-sim"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .env_remove("CVS_SIM_THREADS")
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn random_circuit(s: f64, r: f64) -> Value {
    json!({
        "circuit": { "modes": 4, "photons": 2, "s": s, "r": r },
        "interferometer": { "kind": "random", "p": 1, "seed": 11 },
    })
}

#[test]
fn embed_writes_sigma_and_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg =
        json!({ "embed": { "x": { "rows": 1, "cols": 1, "real": [1.0] }, "nu": 1.0, "modes": 4 } });
    let o = run(dir.path(), &["embed"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sigma = read_json(&dir.path().join("out/sigma.json"));
    assert_eq!(sigma["rows"], 4);
    let real: Vec<f64> = serde_json::from_value(sigma["real"].clone()).unwrap();
    assert_eq!(&real[..2], &[0.0, 1.0]);
    assert_eq!(&real[4..6], &[1.0, 0.0]);
    let manifest = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(manifest["command"], "embed");
    let files: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["file"].as_str().unwrap())
        .collect();
    assert_eq!(files, ["sigma.json", "blocks.json"]);
}

#[test]
fn embed_rejects_large_nu() {
    let dir = TempDir::new().unwrap();
    let cfg =
        json!({ "embed": { "x": { "rows": 1, "cols": 1, "real": [2.0] }, "nu": 1.0, "modes": 4 } });
    let o = run(dir.path(), &["embed"], &cfg);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nu exceeds 1/||X||"));
}

#[test]
fn prob_paths_and_unit_detector_squeezing() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "circuit": { "modes": 4, "photons": 2, "s": 1.25, "r": 1.25 },
        "interferometer": { "kind": "embedded", "x": { "rows": 1, "cols": 1, "real": [0.7] }, "nu": 1.2, "phi": 0.6 },
    });
    let o = run(dir.path(), &["prob"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("out/prob.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let ratio = v["perm_path"].as_f64().unwrap() / v["haf_path"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-9);
    assert!(v["pr_cvs_origin"].as_f64().unwrap() > 0.0);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);

    let o = run(dir.path(), &["prob"], &random_circuit(1.3, 1.0));
    assert_eq!(code(&o), 0);
    let v = read_json(&dir.path().join("out/prob.json"));
    assert_eq!(v["pr_cvs_origin"].as_f64().unwrap(), 0.0);
    assert!(v["perm_path"].is_null());
}

#[test]
fn oracle_default_circuit_within_tolerance() {
    let dir = TempDir::new().unwrap();
    let mut cfg = random_circuit(1.25, 1.25);
    cfg["oracle"] = json!({ "circuits": 2 });
    let o = run(dir.path(), &["oracle", "--cutoff", "14"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("out/oracle.json"));
    assert!(v["max_rel_err"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["circuits"].as_array().unwrap().len(), 2);
    let c = &v["constant"];
    assert!(c["cv"].as_f64().unwrap() < 1e-3);
    assert!(
        (c["mean"].as_f64().unwrap() / c["born_constant"].as_f64().unwrap() - 1.0).abs() < 1e-3
    );
}

#[test]
fn oracle_trivial_without_squeezing() {
    let dir = TempDir::new().unwrap();
    let mut cfg = random_circuit(1.0, 1.0);
    cfg["oracle"] = json!({ "circuits": 1 });
    let o = run(dir.path(), &["oracle", "--cutoff", "10"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("out/oracle.json"));
    let entry = &v["circuits"][0];
    assert!(entry["formula"].as_f64().unwrap() < 1e-20);
    assert!(entry["oracle"].as_f64().unwrap() < 1e-20);
    assert!(entry["origin_density"].is_null());
}

#[test]
fn scan_equal_counts_peaks_at_one_plus_root_two() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({ "scan": { "modes": 4, "photons": 4, "l_values": [1.0] } });
    let o = run(dir.path(), &["scan"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("out/argmax.csv")).unwrap();
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[1] - (1.0 + 2f64.sqrt())).abs() < 1e-6);
    assert!((row[3] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    let grid = fs::read_to_string(dir.path().join("out/kappa.csv")).unwrap();
    assert_eq!(grid.lines().count(), 302);
}

#[test]
fn kak_identity_sigma() {
    let dir = TempDir::new().unwrap();
    let eye =
        json!({ "rows": 3, "cols": 3, "real": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0] });
    let cfg =
        json!({ "interferometer": { "kind": "files", "theta": eye, "sigma": eye, "phi": 0.4 } });
    let o = run(dir.path(), &["kak"], &cfg);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("out/kak.json"));
    assert_eq!(v["p"], 3);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn sample_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let mut cfg = random_circuit(1.2, 1.1);
    cfg["samples"] = json!(300);
    let args = ["sample", "--seed", "5", "--cutoff", "12", "--eta", "0.2"];
    assert_eq!(code(&run(dir.path(), &args, &cfg)), 0);
    let first = fs::read(dir.path().join("out/samples.csv")).unwrap();
    let manifest = fs::read(dir.path().join("out/manifest.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cvs-sim"))
        .args(args)
        .arg("--config")
        .arg(dir.path().join("config.json"))
        .arg("--out")
        .arg(dir.path().join("again"))
        .env("CVS_SIM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(dir.path().join("again/samples.csv")).unwrap(),
        first
    );
    assert_eq!(
        fs::read(dir.path().join("again/manifest.json")).unwrap(),
        manifest
    );

    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 301);
    assert!(text.starts_with("chain,index,b_q1,"));
    let m: Value = serde_json::from_slice(&manifest).unwrap();
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["circuit"]["eta"], 0.2);
}

#[test]
fn validation_and_io_exit_codes() {
    let dir = TempDir::new().unwrap();
    let mut odd = random_circuit(1.2, 1.2);
    odd["circuit"]["photons"] = json!(1);
    assert_eq!(code(&run(dir.path(), &["prob"], &odd)), 2);

    let mut small = random_circuit(1.2, 1.2);
    small["circuit"]["photons"] = json!(4);
    assert_eq!(code(&run(dir.path(), &["prob"], &small)), 2);

    let mut unknown = random_circuit(1.2, 1.2);
    unknown["circuit"]["squeeze"] = json!(2.0);
    assert_eq!(code(&run(dir.path(), &["prob"], &unknown)), 2);

    let missing = Command::new(env!("CARGO_BIN_EXE_cvs-sim"))
        .args(["prob", "--config"])
        .arg(dir.path().join("nope.json"))
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(code(&missing), 4);

    let file_sigma = json!({
        "circuit": { "modes": 2, "photons": 0, "s": 1.1, "r": 1.1 },
        "interferometer": { "kind": "files", "theta": "theta.json", "sigma": "missing.json" },
    });
    fs::write(
        dir.path().join("theta.json"),
        r#"{"rows":2,"cols":2,"real":[1,0,0,1]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(dir.path(), &["kak"], &file_sigma)), 4);
}
