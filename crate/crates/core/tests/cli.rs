use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qdspin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdspin"))
        .args(args)
        .current_dir(dir)
        .env_remove("QDSPIN_OUT_DIR")
        .env_remove("QDSPIN_THREADS")
        .output()
        .expect("spawn qdspin")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &str = r#"{
  "seed": 3,
  "plateau_map": {
    "energy": { "start": 1.335688, "stop": 1.335768, "n": 9 },
    "voltage": { "start": 0.24, "stop": 0.42, "n": 7 },
    "rabi": 1.2e9
  },
  "pump_probe": {
    "protocol": { "repetitions": 1 }
  },
  "transmission": {
    "detuning": { "start": -1.0e-5, "stop": 1.0e-5, "n": 5 },
    "branch": "red"
  }
}"#;

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.json");
    std::fs::write(&path, SMALL).unwrap();
    path.display().to_string()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn switch_energy_prints_bookkeeping() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qdspin(&["switch-energy", "--out", "se"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("pump energy: 40 fJ/cycle"), "{text}");
    assert!(text.contains("photons per cycle: 100"));
    assert!(text.contains("switching energy: 0.4 fJ/photon"));
    let out = tmp.path().join("se");
    for f in ["switch_energy.csv", "switch_energy.json", "switch_energy.py", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn check_validates_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qdspin(&["plateau-map", "--check"], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("configuration ok"));
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let run = |dir: &str, threads: &str| {
        let o = qdspin(&["plateau-map", "--config", &cfg, "--out", dir, "--threads", threads], tmp.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let files = ["plateau_map.csv", "plateau_map.json", "plateau_map.py", "manifest.json"];
    let a = tmp.path().join("a");
    run("a", "1");
    let first: Vec<Vec<u8>> = files.iter().map(|f| read(&a, f)).collect();
    run("a", "1");
    for (f, bytes) in files.iter().zip(&first) {
        assert!(read(&a, f) == *bytes, "{f} changed on rerun");
    }
    run("c", "2");
    let c = tmp.path().join("c");
    for f in &files[..3] {
        assert!(read(&a, f) == read(&c, f), "{f} depends on thread count");
    }
}

#[test]
fn manifest_lists_artifacts_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let before = std::fs::read(&cfg).unwrap();
    let o = qdspin(&["transmission", "--config", &cfg, "--out", "t", "--seed", "8"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&cfg).unwrap(), before);

    let m: Value = serde_json::from_slice(&read(&tmp.path().join("t"), "manifest.json")).unwrap();
    assert_eq!(m["tool"], "qdspin");
    assert_eq!(m["subcommand"], "transmission");
    let listed: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for f in &listed {
        assert!(tmp.path().join("t").join(f).exists(), "{f}");
    }
    assert!(listed.contains(&"transmission.csv"));
    assert_eq!(m["resolved_config"]["config"]["seed"], 8);
    assert_eq!(m["resolved_config"]["config"]["transmission"]["branch"], "red");
    assert!(m["resolved_config"]["params"].is_object());
}

#[test]
fn out_dir_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qdspin"))
        .args(["switch-energy"])
        .current_dir(tmp.path())
        .env("QDSPIN_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("from-env/manifest.json").exists());
}

#[test]
fn default_out_dir_is_per_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qdspin(&["switch-energy"], tmp.path());
    assert!(o.status.success());
    assert!(tmp.path().join("qdspin-out/switch-energy/manifest.json").exists());
}

#[test]
fn usage_and_config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(qdspin(&["no-such-command"], tmp.path()).status.code(), Some(1));
    assert_eq!(qdspin(&[], tmp.path()).status.code(), Some(1));
    assert_eq!(qdspin(&["--help"], tmp.path()).status.code(), Some(0));

    std::fs::write(tmp.path().join("bad.json"), r#"{ "plateau_mapp": {} }"#).unwrap();
    let o = qdspin(&["plateau-map", "--config", "bad.json"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let cfg = small_config(tmp.path());
    let o = qdspin(&["two-color-map", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(1), "missing block");
    let o = qdspin(&["plateau-map", "--config", "missing.json"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let o = qdspin(&["plateau-map", "--threads", "0"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_failures_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let o = qdspin(&["pump-probe", "--config", &cfg, "--out", "pp"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn pump_probe_writes_trace_for_both_pumps() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qdspin(&["pump-probe", "--out", "pp"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = String::from_utf8(read(&tmp.path().join("pp"), "pump_probe_trace.csv")).unwrap();
    let header = trace.lines().next().unwrap();
    assert!(header.starts_with("time,"));
    assert!(header.contains("blue_pump_") && header.contains("red_pump_"));
    let summary: Value = serde_json::from_slice(&read(&tmp.path().join("pp"), "pump_probe.json")).unwrap();
    assert!(summary.is_object());
}
