use std::process::Command;

use serde_json::Value;
use siegel_moduli::cli::{run, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE};

fn siegel(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_siegel")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn call(args: &[&str]) -> Value {
    let argv: Vec<String> = std::iter::once("siegel")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let o = run(&argv);
    assert_eq!(o.code, EXIT_OK, "{o:?}");
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn reduce_example() {
    let v = call(&["reduce", "--point", r#"{"g":1,"X":[[0.3]],"Y":[[0.4]]}"#]);
    assert_eq!(v["reduced"]["X"][0][0].as_f64().unwrap(), -0.2);
    assert_eq!(v["reduced"]["Y"][0][0].as_f64().unwrap(), 1.6);
    assert_eq!(v["in_fundamental_domain"], Value::Bool(true));
}

#[test]
fn distance_example_prints_fifteen_digits() {
    let (code, out, _) = siegel(&[
        "distance",
        "--a",
        r#"{"g":1,"X":[[0]],"Y":[[1]]}"#,
        "--b",
        r#"{"g":1,"X":[[0]],"Y":[[2]]}"#,
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r#"{"distance":0.693147180559945}"#);
}

#[test]
fn emitted_points_are_accepted_back() {
    let input = r#"{"g":2,"X":[[0.7,-0.3],[-0.3,1.2]],"Y":[[0.5,0.1],[0.1,0.3]]}"#;
    let v = call(&["reduce", "--point", input]);
    let reduced = v["reduced"].to_string();
    let again = call(&["reduce", "--point", &reduced]);
    assert_eq!(again["reduced"], v["reduced"]);
    let e = call(&["embed", "--point", &reduced, "--to", "3"]);
    let back = call(&["embed", "--point", &e["point"].to_string()]);
    assert_eq!(back["universal"]["point"], v["reduced"]);
}

#[test]
fn partition_is_deterministic() {
    let args = [
        "partition",
        "--alpha",
        "1.0",
        "--gmax",
        "2",
        "--n",
        "100000",
        "--seed",
        "7",
    ];
    let (c1, a, _) = siegel(&args);
    let (c2, b, _) = siegel(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    for key in ["estimate", "stderr", "n", "seed", "tail_bound"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn config_file_sits_under_flags() {
    let dir = std::env::temp_dir().join(format!("siegel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "alpha = 2.0\nG = 1\nn = 5000\nseed = 11\n").unwrap();
    let path = cfg.to_str().unwrap();
    let v = call(&["partition", "--config", path]);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["n"], 5000);
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
    let w = call(&["partition", "--config", path, "--seed", "12", "--gmax", "2"]);
    assert_eq!(w["seed"], 12);
    assert_eq!(w["terms"].as_array().unwrap().len(), 2);

    let out = dir.join("result.json");
    let (code, stdout, _) = siegel(&["volume", "--genus", "1", "--quadrature", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["estimate"].as_f64().unwrap() - std::f64::consts::PI / 3.0).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let (code, out, _) = siegel(&["reduce", "--point", r#"{"g":1,"X":[[0]],"Y":[[-1]]}"#]);
    assert_eq!(code, EXIT_DOMAIN);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error_kind"], "NotPositiveDefinite");
    assert!(v["message"].is_string());

    let (code, _, _) = siegel(&["volume", "--genus", "3"]);
    assert_eq!(code, EXIT_DOMAIN);
    let (code, _, _) = siegel(&["reduce", "--input", "/nonexistent/point.json"]);
    assert_eq!(code, EXIT_IO);
    let (code, _, _) = siegel(&["reduce", "--point", "{not json"]);
    assert_eq!(code, EXIT_IO);
    let (code, _, _) = siegel(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = siegel(&["volume", "--genus", "1", "--colour", "red"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn other_subcommands() {
    let s = call(&["strata", "--genus", "3", "--include-interior"]);
    assert_eq!(s["count"], 7);
    let p = call(&["period", "--branch-points=-1,0,1"]);
    assert!((p["period_matrix"]["Y"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let c = call(&[
        "period",
        "--curve",
        r#"{"branch_points":[1,[-0.5,0.8660254037844386],[-0.5,-0.8660254037844386]]}"#,
    ]);
    assert!((c["reduced"]["X"][0][0].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let d = call(&["degenerate", "--kind", "sep", "--genera", "1,1"]);
    assert_eq!(d["classification"], "Finite");
    let n = call(&[
        "degenerate",
        "--family",
        r#"{"kind":"nonsep","genera":[2],"epsilons":[0.1,0.01,0.001]}"#,
    ]);
    assert_eq!(n["classification"], "Divergent");
    assert_eq!(n["limit_stratum"], "Boundary({1})");
    let raw = call(&["period", "--curve", r#"{"branch_points":[-1,0,1,2],"normalize":false}"#]);
    assert!(raw["a_periods"].is_array() && raw["transform"]["A"].is_array());
    let i = call(&["integrate", "--weights", "1:1.0", "--gmax", "2", "--n", "2000"]);
    assert_eq!(i["terms"].as_array().unwrap().len(), 1);
}
