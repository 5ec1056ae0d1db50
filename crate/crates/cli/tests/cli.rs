use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: [&str; 4] = ["--set", "grid.n=16", "--set", "grid.box_l=12.0"];

fn emx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emx"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn check<'a>(manifest: &'a Value, name: &str) -> &'a Value {
    manifest["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name} in {manifest:#}"))
}

#[test]
fn flat_background_gives_the_trivial_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["stationary", "--eps", "0"];
    args.extend(SMALL);
    let out = emx(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(check(&m, "trivial-solution")["status"], "pass");
    let rep = json(&dir.path().join("stationary.json"));
    assert_eq!(rep["log"]["iterations"], 0);
    assert!(dir.path().join("stationary.emxf").exists());
}

#[test]
fn invalid_values_exit_with_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let out = emx(dir.path(), &["stationary", "--gamma", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma > 1"));

    let out = emx(dir.path(), &["evolve", "--set", "energy.kappa2=0.1", "--set", "energy.kappa3=0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa3 < kappa2"));

    let out = emx(dir.path(), &["evolve", "--cfl", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrator.cfl"));

    let out = emx(dir.path(), &["lindecay", "--t-grid", "1:100"]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nnn = 3\n").unwrap();
    let out = emx(dir.path(), &["stationary", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nn"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn equilibrium_run_records_fixedness() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve", "--init", "stationary-exact", "--t-end", "1"];
    args.extend(SMALL);
    let out = emx(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(check(&m, "fixedness")["status"], "pass");
    assert_eq!(m["pass"], true);
}

#[test]
fn serial_reruns_are_bit_identical_and_certifiable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve", "--t-end", "1", "--seed", "7", "--threads", "1"];
    args.extend(SMALL);
    for d in [&a, &b] {
        let out = emx(d.path(), &args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "series.csv"), read(&b, "series.csv"));
    assert_eq!(read(&a, "final.emxf"), read(&b, "final.emxf"));
    let m = json(&a.path().join("manifest.json"));
    assert_eq!(m["seed"], 7);
    // configs differ in out_dir only, so compare the recorded output hashes
    let hashes = |m: &Value| -> Vec<Value> {
        m["outputs"].as_array().unwrap().iter().map(|o| o["sha256"].clone()).collect()
    };
    assert_eq!(hashes(&m), hashes(&json(&b.path().join("manifest.json"))));
    let header = String::from_utf8(read(&a, "series.csv")).unwrap();
    assert!(header.starts_with("t,tau,E_N,D_N,E_N^h,D_N^h,int1,int2,int3,gauss_E,gauss_B,"));

    // certify the series written above
    let series = a.path().join("series.csv");
    let out = emx(a.path(), &["lyapunov", "--series", series.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let rep = json(&a.path().join("lyapunov.json"));
    assert_eq!(rep["observations"], 3);
    assert_eq!(rep["certificate"]["certified"], true);
}

#[test]
fn restart_from_a_written_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve", "--t-end", "0.5", "--cadence", "0.25"];
    args.extend(SMALL);
    assert!(emx(dir.path(), &args).status.success());
    let snap = dir.path().join("final.emxf");
    let next = tempfile::tempdir().unwrap();
    let mut args = vec!["evolve", "--init", "custom", snap.to_str().unwrap(), "--t-end", "0.5"];
    args.extend(SMALL);
    let out = emx(next.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // wrong grid
    let other = tempfile::tempdir().unwrap();
    let out = emx(other.path(), &["evolve", "--init", "custom", snap.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn decay_fits_carry_target_tolerance_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = emx(
        dir.path(),
        &["lindecay", "--t-grid", "1:200:25", "--fit-window", "20:200", "--out", "d.csv"],
    );
    assert_ne!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let fits = json(&dir.path().join("d.json"));
    let fits = fits.as_array().unwrap();
    assert_eq!(fits.len(), 5);
    for f in fits {
        for key in ["label", "estimate", "target", "tolerance", "pass", "window", "samples"] {
            assert!(f.get(key).is_some(), "{key} missing in {f}");
        }
    }
    let m = json(&dir.path().join("manifest.json"));
    let all_pass = fits.iter().all(|f| f["pass"] == true);
    assert_eq!(m["pass"], all_pass);
    assert_eq!(out.status.success(), all_pass);
    let csv = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,rho,u,E,B,grad_B");
    assert_eq!(csv.lines().count(), 26);
}
