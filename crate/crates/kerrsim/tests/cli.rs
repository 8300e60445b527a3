// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use kerrsim::output::read_sweep_json;

const SMALL: [&str; 6] = ["--alpha", "6", "--beta", "6", "--phi0", "0.0027222222222222222"];

fn kerrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerrsim")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn with_small<'a>(head: &[&'a str]) -> Vec<&'a str> {
    let mut v = head.to_vec();
    v.extend(SMALL);
    v
}

#[test]
fn run_reports_the_optimum() {
    let out = kerrsim(&with_small(&["run", "--format", "json"]));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let g2 = v["result"]["g2"].as_f64().unwrap();
    assert!((g2 - 0.90495).abs() < 1e-4, "{g2}");
    assert_eq!(v["metadata"]["variant"], "gaussian");
    assert_eq!(v["metadata"]["parameters"]["alpha"], 6.0);
}

#[test]
fn sweep_csv_is_deterministic_and_headered() {
    let args = with_small(&["sweep", "--param", "nu", "--values", "0.7,0.3,0.5", "--grid", "0.01:0.1:3"]);
    let a = kerrsim(&args);
    let b = kerrsim(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "swept_name,swept_value,n_displacement,g2,success_prob,optimal");
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[1].starts_with("nu,0.7,") && lines[1].ends_with("true"));
    assert!(lines[5].starts_with("nu,0.3,"));
}

#[test]
fn sweep_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eps.json");
    let mut args = with_small(&["sweep", "--param", "epsilon", "--range", "0.1:0.5:3", "--format", "json"]);
    args.extend(["--out", path.to_str().unwrap()]);
    let out = kerrsim(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let result = read_sweep_json(&path).unwrap();
    assert_eq!(result.rows.len(), 3);
    assert!(result.metadata.wall_time_s.is_none());
    let again = dir.path().join("again.json");
    kerrsim::output::write_json(&result, std::fs::File::create(&again).unwrap()).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    // wider binning never improves the squeezing
    assert!(result.rows.windows(2).all(|w| w[1].g2 >= w[0].g2 && w[1].success_prob > w[0].success_prob));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small validation point\nalpha = 6\nbeta = 6\nphi0 = 0.0027222222222222222\nnu = 0.3\n").unwrap();
    let file_only = kerrsim(&["run", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let overridden = kerrsim(&["run", "--config", cfg.to_str().unwrap(), "--nu", "0.5", "--format", "json"]);
    let direct = kerrsim(&with_small(&["run", "--format", "json"]));
    assert_eq!(code(&file_only), 0);
    assert_ne!(file_only.stdout, direct.stdout);
    assert_eq!(overridden.stdout, direct.stdout);
}

#[test]
fn invalid_configuration_exits_2() {
    assert_eq!(code(&kerrsim(&with_small(&["run", "--eta", "1.5"]))), 2);
    assert_eq!(code(&kerrsim(&["run", "--set", "heroic"])), 2);
    assert_eq!(code(&kerrsim(&["sweep", "--param", "kappa", "--values", "1"])), 2);
    assert_eq!(code(&kerrsim(&["run", "--frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "eta = 0.5\ncolour = blue\n").unwrap();
    let out = kerrsim(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn numerical_failure_exits_3() {
    // an outcome far from every probe branch leaves nothing to post-select
    let out = kerrsim(&with_small(&["run", "--delta", "1000,0", "--sharp"]));
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn large_runs_need_permission() {
    let out = kerrsim(&["run", "--set", "optimistic", "--oracle"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-large"));
}

#[test]
fn wigner_grid_shows_negativity() {
    let out = kerrsim(&["wigner", "--xs", "-10:10:81", "--ps", "-10:10:81", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["min"].as_f64().unwrap() < 0.0);
    assert!((v["integral"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn twopeak_and_optomech_tables() {
    let out = kerrsim(&["twopeak", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["separation"], 16);

    let out = kerrsim(&["optomech", "--g", "1", "--omega-m", "2", "--t", "0.7853981633974483", "--m-max", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,m,kappa,overlap,coupling_multiplier");
    assert_eq!(lines.len(), 4);
    // kappa = (4 g / omega_m) sin^2(pi / 4) = 1, so |M - N| = 1 gives e^-1
    assert!(lines[1].starts_with("0,0,") && lines[1].ends_with(",1.0,0"));
    let overlap: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!((overlap - (-1f64).exp()).abs() < 1e-12);
}

#[test]
fn selftest_passes() {
    let out = kerrsim(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);
}

#[test]
fn output_goes_to_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pk.csv");
    let out = kerrsim(&["twopeak", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(Path::new(&path).exists());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("n,re,im,population,peak\n"));
}
