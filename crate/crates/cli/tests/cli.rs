use std::process::{Command, Output};

use serde_json::Value;

fn ffbt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffbt"))
        .args(args)
        .env_remove("FFBT_VERTEX_BUDGET")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn ball_counts() {
    let v = json(&ffbt(&["ball", "--q", "2", "--r", "2", "--radius", "1"]));
    assert_eq!(v["result"]["vertices"], 4);
    assert_eq!(v["result"]["counts"]["1"], 3);
    assert!(v["warnings"][0].as_str().unwrap().contains("truncation"));
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn usage_errors() {
    for args in [
        vec!["ball", "--q", "6"],
        vec!["ball", "--q", "2", "--ideal", "1"],
        vec!["ball", "--q", "2", "--r", "1"],
        vec!["stabilizer", "--q", "2", "--radius", "1"],
        vec!["ball", "--bogus"],
        vec!["homology", "--q", "2", "--format", "dot"],
    ] {
        let out = ffbt(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let err = String::from_utf8(ffbt(&["ball", "--q", "6"]).stderr).unwrap();
    assert!(err.contains("--q"));
}

#[test]
fn homology_example() {
    let v = json(&ffbt(&[
        "homology", "--q", "2", "--r", "2", "--ideal", "t", "--radius", "2",
    ]));
    let r = &v["result"];
    assert_eq!(r["euler"]["additive"], true);
    for (_, h) in r["full"]["degree"].as_object().unwrap() {
        assert_eq!(h["betti"], 0);
    }
    assert_eq!(r["stable"]["meta"]["radius"], 2);
    assert_eq!(r["stable"]["meta"]["level"], serde_json::json!([0, 1]));
}

#[test]
fn deterministic_across_threads() {
    let args = ["components", "--q", "3", "--ideal", "t+1", "--radius", "3"];
    let a = ffbt(&[&args[..], &["--threads", "1"]].concat());
    let b = ffbt(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = ffbt(&args);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn timing_flag() {
    let v = json(&ffbt(&["ball", "--q", "2", "--radius", "1", "--timing"]));
    assert!(v["timing_ms"].is_number());
}

#[test]
fn dot_output() {
    let out = ffbt(&["ball", "--q", "2", "--radius", "1", "--format", "dot"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("// values are computed on a finite ball"));
    assert_eq!(s.matches(" -- ").count(), 3);
}

#[test]
fn budget_exit_code() {
    let out = ffbt(&["ball", "--q", "2", "--radius", "3", "--vertex-budget", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_ffbt"))
        .args(["ball", "--q", "2", "--radius", "3"])
        .env("FFBT_VERTEX_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# small tree\nq = 3\nr = 2\nradius = 1\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&ffbt(&["ball", "--config", p]));
    assert_eq!(v["result"]["vertices"], 5);
    let v = json(&ffbt(&["ball", "--config", p, "--q", "2"]));
    assert_eq!(v["result"]["vertices"], 4);
    std::fs::write(&path, "q = 3\nshape = round\n").unwrap();
    let out = ffbt(&["ball", "--config", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    let out = ffbt(&[
        "ball",
        "--q",
        "2",
        "--radius",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["vertices"], 10);
}

#[test]
fn stabilizer_with_brute_and_sigma() {
    let v = json(&ffbt(&[
        "stabilizer",
        "--q",
        "2",
        "--ideal",
        "t",
        "--radius",
        "2",
        "--simplex",
        "0",
        "--brute",
        "--w1",
        "1,0",
    ]));
    let r = &v["result"];
    assert_eq!(r["brute"]["agrees"], true);
    assert_eq!(r["unstable"], false);
    assert_eq!(r["sigma"]["in_b_sigma"], false);
}

#[test]
fn restrict_containment() {
    let v = json(&ffbt(&[
        "restrict", "--q", "2", "--ideal", "t^2", "--coarse", "t", "--radius", "2",
    ]));
    assert_eq!(v["result"]["commutes"], true);
    let out = ffbt(&[
        "restrict", "--q", "2", "--ideal", "t", "--coarse", "t^2", "--radius", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_subset() {
    let out = ffbt(&["verify", "--q", "2", "--only", "enumeration-census,11"]);
    let v = json(&out);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS] 12 enumeration-census"));
    assert_eq!(
        ffbt(&["verify", "--q", "2", "--only", "nope"])
            .status
            .code(),
        Some(2)
    );
}
