use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn syl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syl")).args(args).current_dir(dir).output().expect("spawn syl")
}

fn run_with(cmd: &str, config: &str, extra: &[&str]) -> (tempfile::TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("config.json"), config).unwrap();
    let mut args = vec![cmd, "--config", "config.json", "--out", "out"];
    args.extend_from_slice(extra);
    let out = syl(&args, dir.path());
    (dir, out)
}

fn report(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join("out").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn cylinder_report() {
    let (dir, out) = run_with("cylinder", r#"{"n":5,"k":2}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "cylinder.json");
    assert!((r["result"]["xi"].as_f64().unwrap() - 0.173287).abs() < 1e-6);
    assert!((r["result"]["bifurcation_radius"].as_f64().unwrap() - 23.1407).abs() < 1e-4);
    assert_eq!(r["seed"], 0);
}

#[test]
fn cone_check_rejects_example() {
    let (dir, out) = run_with("cone-check", r#"{"lambda":[3,1,-1],"k":2}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(dir.path(), "cone-check.json")["result"]["inside"], false);
    let (dir, _) = run_with("cone-check", r#"{"lambda":[3,1,1],"k":2}"#, &[]);
    assert_eq!(report(dir.path(), "cone-check.json")["result"]["inside"], true);
}

#[test]
fn annulus_counts_and_trajectories() {
    let (dir, out) = run_with("solve-annulus", r#"{"n":5,"k":2,"R":2,"c1":0,"c2":0}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "solve-annulus.json");
    assert_eq!(r["result"]["solutions"].as_array().unwrap().len(), 1);
    let csv = std::fs::read_to_string(dir.path().join("out/solution_0.csv")).unwrap();
    assert!(csv.starts_with("t,xi,xi_t,xi_tt,r,u"));

    let (dir, out) = run_with("solve-annulus", r#"{"n":5,"k":2,"R":30,"c1":0,"c2":0}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "solve-annulus.json");
    let n = r["result"]["solutions"].as_array().unwrap().len();
    assert!(n >= 2);
    assert!(dir.path().join(format!("out/solution_{}.csv", n - 1)).exists());
}

#[test]
fn input_errors_exit_one() {
    let (_d, out) = run_with("solve-annulus", r#"{"n":5,"k":2,"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let (_d, out) = run_with("solve-annulus", r#"{"n":5,"k":2,"R":0.5}"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let (_d, out) = run_with("cylinder", r#"{"n":5,"k":2,"extra":1}"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let (_d, out) = run_with("verify", r#"{"suite":"nope"}"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let (_d, out) = run_with("cylinder", r#"{"n":5,"k":2}"#, &["--tol=-1"]);
    assert_eq!(out.status.code(), Some(0), "tolerance unused by cylinder");
    let (_d, out) = run_with("solve-annulus", r#"{"n":5,"k":2,"R":2}"#, &["--tol=-1"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(syl(&["cylinder"], dir.path()).status.code(), Some(1));
    assert_eq!(syl(&["frobnicate"], dir.path()).status.code(), Some(1));
}

#[test]
fn inconclusive_scan_exits_two() {
    // a 3-point scan far below the cylinder: every cell breaks down early
    let cfg = r#"{"n":5,"k":2,"R":2,"c1":0,"c2":0,"scan":{"lo":-40,"hi":-39,"points":3}}"#;
    let (dir, out) = run_with("solve-annulus", cfg, &[]);
    let r = report(dir.path(), "solve-annulus.json");
    let status = r["result"]["status"].as_str().unwrap().to_string();
    match status.as_str() {
        "inconclusive" => assert_eq!(out.status.code(), Some(2)),
        _ => assert_eq!(out.status.code(), Some(0), "status {status}"),
    }
}

#[test]
fn rstar_brackets() {
    let (dir, out) = run_with("rstar", r#"{"n":5,"k":2,"c1":-0.3,"c2":0}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "rstar.json");
    assert_eq!(r["result"]["status"], "bracketed");
    assert!(r["result"]["r_star"].as_f64().unwrap() > 1.0);
}

#[test]
fn counterexample_writes_table() {
    let (dir, out) = run_with("counterexample", r#"{"n":5,"k":2,"c":-1,"eps":[0.001,0.01],"delta":0.05}"#, &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let r = report(dir.path(), "counterexample.json");
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn build_f_and_verify_are_deterministic() {
    let (a, out) = run_with("build-f", r#"{"n":4,"k":2,"alpha":0.5,"samples":100}"#, &["--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let (b, _) = run_with("build-f", r#"{"n":4,"k":2,"alpha":0.5,"samples":100}"#, &["--seed", "11"]);
    let ra = std::fs::read(a.path().join("out/build-f.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.path().join("out/build-f.json")).unwrap());
    assert_eq!(report(a.path(), "build-f.json")["seed"], 11);

    let (a, out) = run_with("verify", r#"{"suite":"boundary"}"#, &["--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let (b, _) = run_with("verify", r#"{"suite":"boundary"}"#, &["--seed", "3"]);
    let ra = std::fs::read(a.path().join("out/verify.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.path().join("out/verify.json")).unwrap());
    let r = report(a.path(), "verify.json");
    for check in r["result"][0]["checks"].as_array().unwrap() {
        assert_eq!(check["passed"], true);
        assert!(check["max_violation"].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn thread_cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"n":5,"k":2,"R":2}"#).unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_syl"))
            .args(["solve-annulus", "--config", "c.json", "--out", threads])
            .env("SYL_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run("1").status.code(), Some(0));
    assert_eq!(run("4").status.code(), Some(0));
    let one = std::fs::read(dir.path().join("1/solve-annulus.json")).unwrap();
    assert_eq!(one, std::fs::read(dir.path().join("4/solve-annulus.json")).unwrap());
    assert_eq!(run("zero").status.code(), Some(1));
}
