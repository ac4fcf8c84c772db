use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smoothreg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn header(out: &Path, file: &str) -> String {
    fs::read_to_string(out.join(file)).unwrap().lines().next().unwrap().to_string()
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn pi_identity_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["pi-identity", "--xi", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    let f = &s["experiments"][0];
    assert_eq!(f["verdict"], "pass");
    assert_eq!(f["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(f["config_sha256"].as_str().unwrap().len(), 64);
    let csv = fs::read_to_string(dir.path().join("pi_identity.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert!((row[1].parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 1e-10);
    let cfg: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["pi_identity"]["xis"], serde_json::json!([2.0]));
}

#[test]
fn logarithm_is_in_both_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check-potential"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let ev = &summary(dir.path())["experiments"][0]["evidence"];
    assert_eq!(ev["in_v"], true);
    assert_eq!(ev["in_vstar"], true);
    assert_eq!(ev["r_bar"], "inf");
    assert_eq!(header(dir.path(), "vstar.csv"), "k,lambda,sup_deviation");
}

#[test]
fn homogeneous_sweep_is_not_strongly_regularizable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "h.json", r#"{ "potential": { "family": "homogeneous", "alpha": 0.5 } }"#);
    let out = run(&["apsidal-sweep", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(0));
    let f = &summary(&dir.path().join("out"))["experiments"][0];
    assert_eq!(f["verdict"], "pass");
    assert_eq!(f["evidence"]["strong_regularizability"], "fail");
    let limit = f["evidence"]["paths"][0]["limit"].as_f64().unwrap();
    assert!((limit - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-3);
    assert_eq!(
        header(&dir.path().join("out"), "apsidal.csv"),
        "path_id,k,epsilon,l,R_minus,beta,delta_theta,quad_err,I1,I2"
    );
}

#[test]
fn outputs_are_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "a.toml", "[audit]\nsamples = 200\n");
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(run(&["bounds-audit", "--config", &cfg, "--jobs", "1"], &a).status.success());
    assert!(run(&["bounds-audit", "--config", &cfg, "--jobs", "3"], &b).status.success());
    assert!(run(&["bounds-audit", "--config", &cfg, "--seed", "7"], &c).status.success());
    let read = |d: &Path| fs::read(d.join("bounds_audit.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(summary(&a)["config_sha256"], summary(&b)["config_sha256"]);
    assert_eq!(summary(&c)["seed"], 7);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = config(dir.path(), "bad.json", r#"{ "potential": { "family": "cubic" } }"#);
    let broken = config(dir.path(), "broken.json", "{ not json");
    let missing = dir.path().join("missing.json");
    for args in [
        vec!["check-potential", "--config", &bad],
        vec!["check-potential", "--config", &broken],
        vec!["check-potential", "--config", missing.to_str().unwrap()],
        vec!["pi-identity", "--xi", "0.5"],
        vec!["apsidal-sweep", "--tol-quad", "-1"],
    ] {
        let out = run(&args, &dir.path().join("out"));
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn continuity_before_the_collision() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", r#"{ "continuity": { "t_factor": 0.9 } }"#);
    let out = run(&["poincare-continuity", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let o = dir.path().join("out");
    assert_eq!(
        header(&o, "continuity.csv"),
        "k,epsilon,l,dq,dv1,dist_total,dist_pos,dist_vel,theta_increment"
    );
    assert_eq!(fs::read_to_string(o.join("continuity.csv")).unwrap().lines().count(), 6);
}

#[test]
fn numerical_verdict_failure_exits_with_one() {
    // the time-T point lies at the rest point of the reflected orbit
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.json", r#"{ "continuity": { "t_factor": 2.0 } }"#);
    let out = run(&["poincare-continuity", "--config", &cfg], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn transmission_demo_exports_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["transmission-demo"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(header(dir.path(), "trajectory.csv"), "t,x,y,vx,vy,r,theta,E,l");
    let events = fs::read_to_string(dir.path().join("events.csv")).unwrap();
    assert!(events.starts_with("t,kind\n"));
    assert_eq!(events.lines().filter(|l| l.ends_with(",collision")).count(), 1);
    let e = &summary(dir.path())["experiments"];
    assert!(e.as_array().unwrap().iter().all(|f| f["verdict"] == "pass"));
}

#[test]
fn section_and_variational_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "s.json",
        r#"{ "section": { "samples": 10 }, "variational": { "cells_log2": 10 } }"#,
    );
    let o = dir.path().join("out");
    assert_eq!(run(&["poincare-section", "--config", &cfg], &o).status.code(), Some(0));
    for i in 0..3 {
        let name = format!("poincare_section_{i}.csv");
        assert_eq!(header(&o, &name), "sample_id,y_qx,y_qy,y_px,y_py,tau,s_qx,s_qy,s_px,s_py,bracket_xi");
        assert_eq!(fs::read_to_string(o.join(&name)).unwrap().lines().count(), 11);
    }
    assert_eq!(run(&["variational-probe", "--config", &cfg], &o).status.code(), Some(0));
    assert_eq!(header(&o, "variational.csv"), "delta,T1,dK_closed,dK_discrete,dV,dA,collision_cell_depth");
}

#[test]
fn oracle_crosscheck_small() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "o.json", r#"{ "crosscheck": { "orbits": 4, "horizon": 20 } }"#);
    let out = run(&["oracle-crosscheck", "--config", &cfg, "--tol-ode", "1e-12"], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&dir.path().join("out"));
    assert_eq!(s["experiments"].as_array().unwrap().len(), 3);
    assert_eq!(fs::read_to_string(dir.path().join("out/orbits.csv")).unwrap().lines().count(), 5);
}
