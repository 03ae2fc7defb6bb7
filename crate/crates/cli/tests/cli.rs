use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
[physical]
epsilon = 0.1
mu = 0.01
omega = 0.5
[grid]
n = 64
length = 32
[time]
t_end = 0.5
dt = 0.02
dt_out = 0.25
[experiment]
mu_list = [1e-2, 3e-3, 1e-3]
";

fn rotgn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotgn")).args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr)))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn coeffs_prints_coefficients_and_constraints() {
    let out = rotgn(&["coeffs", "--omega", "0.5", "--family", "gbbm", "--p", "-0.2", "--theta", "0.7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["constraints"]["all_hold"], true);
    assert!(v["coefficients"]["c"].as_f64().unwrap() > 0.0);
}

#[test]
fn every_subcommand_succeeds_on_a_small_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for cmd in ["simulate-rch", "simulate-rgn", "consistency", "converge", "reconstruct"] {
        let out_dir = dir.path().join(cmd);
        let out = rotgn(&[cmd, "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--jobs", "2", "--seed", "9"]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["command"], cmd);
        assert_eq!(summary["seed"], 9);
        assert_eq!(summary["config"]["grid"]["n"], 64);
        assert!(out_dir.join("manifest.json").exists());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let manifests: Vec<String> = ["a", "b"]
        .iter()
        .map(|name| {
            let out_dir = dir.path().join(name);
            let out = rotgn(&["converge", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
            assert!(out.status.success());
            fs::read_to_string(out_dir.join("manifest.json")).unwrap()
        })
        .collect();
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn config_error_exits_2_with_issues() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[physical]\nmu = -1\n");
    let out = rotgn(&["simulate-rch", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let v = stderr_json(&out);
    assert_eq!(v["error"]["kind"], "config");
    assert_eq!(v["error"]["issues"][0]["line"], 2);
    assert_eq!(v["error"]["issues"][0]["key"], "physical.mu");
}

#[test]
fn usage_error_exits_2() {
    let out = rotgn(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
    let out = rotgn(&["simulate-rgn"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nn = 64\n[time]\ndt = 50\n");
    let out = rotgn(&["simulate-rch", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"]["kind"], "cfl-violation");
}

#[test]
fn io_failure_exits_4() {
    let out = rotgn(&["simulate-rch", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "io");
}

#[test]
fn profile_file_is_resolved_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let rec_dir = dir.path().join("rec");
    let cfg = write_config(dir.path(), SMALL);
    assert!(rotgn(&["reconstruct", "--config", &cfg, "--out", rec_dir.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(rec_dir.join("reconstruct.csv")).unwrap();
    let mut profile = String::from("x,value\n");
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        profile.push_str(&format!("{},{}\n", cells[0], cells[1]));
    }
    fs::write(dir.path().join("u0.csv"), profile).unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("[time]", "[initial]\nfile = \"u0.csv\"\n[time]"));
    let rec2 = dir.path().join("rec2");
    let out = rotgn(&["reconstruct", "--config", &cfg, "--out", rec2.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(rec2.join("reconstruct.csv")).unwrap(), text);
}
