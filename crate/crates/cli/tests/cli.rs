use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coupled"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coupled-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn out_of_range_parameters_are_usage_errors() {
    let out = run(&["verify", "--model", "rendezvous", "--alpha", "1.5"]);
    assert_eq!(code(&out), 2);
    let out = run(&["verify", "--model", "platoon", "--zeta", "-1"]);
    assert_eq!(code(&out), 2);
    let out = run(&["scenario", "--name", "nonsense"]);
    assert_eq!(code(&out), 2);
    let out = run(&["scenario", "--name", "rendezvous", "--frequencies", "48"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn spectrum_writes_the_contract_header() {
    let dir = scratch("spectrum");
    let out = run(&["spectrum", "--model", "rendezvous", "--alpha", "0.4", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.join("spectrum.csv")).expect("csv exists");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,re,im,abs_phi"));
    assert!(lines.next().is_some());
}

#[test]
fn discrete_snapshots_follow_the_dyadic_ladder() {
    let dir = scratch("simulate");
    let out = run(&[
        "simulate", "--model", "rendezvous", "--alpha", "0.5", "--n-max", "8", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let meta = fs::read_to_string(dir.join("trajectory.meta")).expect("meta exists");
    assert!(meta.contains("snapshots = 5"));
    let text = fs::read_to_string(dir.join("trajectory.csv")).expect("csv exists");
    let labels: std::collections::BTreeSet<&str> =
        text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec!["0", "1", "2", "4", "8"]);
}

#[test]
fn flags_override_config_values() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "[spectrum]\ngrid = 64\nmodel = rendezvous\nalpha = 0.4\n").unwrap();
    let from_cfg = dir.join("a");
    let out = run(&[
        "spectrum", "--config", cfg.to_str().unwrap(), "--out", from_cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let lines_cfg = fs::read_to_string(from_cfg.join("spectrum.csv")).unwrap().lines().count();

    let from_flag = dir.join("b");
    let out = run(&[
        "spectrum", "--config", cfg.to_str().unwrap(), "--grid", "16", "--out",
        from_flag.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let lines_flag = fs::read_to_string(from_flag.join("spectrum.csv")).unwrap().lines().count();
    assert!(lines_cfg > lines_flag, "flag must shrink the grid: {lines_cfg} vs {lines_flag}");
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = scratch("badcfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "grid\n").unwrap();
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 1"), "error names the line: {msg}");
}

#[test]
fn a_failed_threshold_exits_three() {
    // 32 frequencies cannot resolve the slow decay at the reference
    // horizon, so the fitted slope honestly leaves the accepted band.
    let dir = scratch("coarse");
    let out = run(&[
        "scenario", "--name", "rendezvous", "--frequencies", "32", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let summary = fs::read_to_string(dir.join("summary.csv")).expect("summary exists");
    assert!(summary.lines().any(|l| l.ends_with(",false")), "summary records the failure");
    assert!(summary.lines().any(|l| l.ends_with(",true")), "other checks still pass");
}

#[test]
fn zero_initial_data_succeeds_immediately() {
    let dir = scratch("empty");
    let out = run(&[
        "scenario", "--name", "second-order", "--initial", "window:0:0,0", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary, "metric,value,threshold,pass\nempty-input,0,0,true\n");
    let cesaro = fs::read_to_string(dir.join("cesaro.csv")).unwrap();
    assert_eq!(cesaro, "n,error\n");
    let rates = fs::read_to_string(dir.join("rates.csv")).unwrap();
    assert_eq!(rates, "abscissa,value\n");
}

#[test]
fn scenario_name_can_come_from_config() {
    let dir = scratch("cfgname");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        "[scenario]\nname = rendezvous\n\n[rendezvous]\nn_max = 512\nfrequencies = 1024\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = run(&[
        "scenario", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.csv").exists());
}
