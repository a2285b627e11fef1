use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwrecon")).args(args).env_remove("GWRECON_CACHE").output().expect("binary runs")
}

fn run_env(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwrecon")).args(args).env("GWRECON_CACHE", cache).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn dims_h2_example() {
    assert_eq!(json_of(&run(&["dims-h2", "--target", "g:2,4", "--n", "0", "--deg", "2"])), json!({"dim_h2": 3}));
}

#[test]
fn kontsevich_example() {
    let v = json_of(&run(&["gw-kontsevich", "--d", "4"]));
    assert_eq!(v, json!({"N": {"1": "1", "2": "1", "3": "12", "4": "620"}}));
}

#[test]
fn gw_eval_example() {
    let v = json_of(&run(&["gw-eval", "--target", "g:2,4", "--d", "1", "--classes", "2|1,1|2,2", "--method", "both"]));
    assert_eq!(v["oracle"], "1");
    assert_eq!(v["reconstruct"], "1");
    assert_eq!(v["agree"], true);
}

#[test]
fn gw_eval_on_projective_plane() {
    // conics through five points
    let v = json_of(&run(&["gw-eval", "--target", "pr:2", "--d", "2", "--classes", "2|2|2|2|2"]));
    assert_eq!(v["oracle"], "1");
    assert_eq!(v["agree"], true);
}

#[test]
fn rationals_are_reduced() {
    // the fitted coefficients of the 1mb relation are fractions
    let v = json_of(&run(&["audit", "--relation", "1mb", "--grid", "small"]));
    let mut values = vec![];
    collect_strings(&v, &mut values);
    let fractions: Vec<&String> = values.iter().filter(|s| s.contains('/') && s.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-')).collect();
    assert!(fractions.iter().any(|s| *s == "-1/4"), "{values:?}");
    for s in fractions {
        let (p, q) = s.split_once('/').unwrap();
        let (p, q): (i64, i64) = (p.parse().unwrap(), q.parse().unwrap());
        assert!(q > 1 && gcd(p.abs(), q) == 1, "{s}");
    }
}

fn collect_strings(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) => out.push(s.clone()),
        Value::Array(a) => a.iter().for_each(|x| collect_strings(x, out)),
        Value::Object(m) => m.values().for_each(|x| collect_strings(x, out)),
        _ => {}
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["dims-h2", "--target", "g:9,4", "--deg", "2"][..],
        &["dims-h2", "--target", "nonsense", "--deg", "2"],
        &["gw-eval", "--target", "g:2,4", "--d", "1", "--classes", "3|1"],
        &["gw-kontsevich", "--d", "9"],
        &["census-p1", "--d", "40"],
        &["audit", "--relation", "nope"],
        &["audit", "--relation", "diff", "--target", "g:2,5"],
        &["cache", "inspect"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn audit_small_grid_passes() {
    let v = json_of(&run(&["audit", "--relation", "diff", "--grid", "small"]));
    assert_eq!(v["passed"], true);
    let rels = v["relations"].as_array().unwrap();
    assert!(rels.iter().any(|r| r["target"] == "pr:2") && rels.iter().any(|r| r["target"] == "g:2,4"));
}

#[test]
fn audit_csv_rows() {
    let out = run(&["--format", "csv", "audit", "--relation", "psisum", "--target", "pr:2", "--grid", "small"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,name,target,degree,monomials,nontrivial,lhs,rhs,passed");
    assert!(lines.len() >= 3);
    for l in &lines[1..] {
        assert!(l.starts_with("relation,psisum,pr:2,") && l.ends_with(",true"), "{l}");
    }
}

#[test]
fn csv_key_value() {
    let out = run(&["--format", "csv", "dims-h2", "--target", "pr:2", "--n", "0", "--deg", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "key,value\ndim_h2,2\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["boundary", "--target", "flag:1,2@3", "--n", "2", "--deg", "1,1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.json");
    let p = path.to_str().unwrap();
    let eval = ["--cache", p, "gw-eval", "--target", "g:2,4", "--d", "1", "--classes", "1|2|1,1|2,2", "--method", "oracle"];
    let first = run(&eval);
    assert_eq!(json_of(&first)["oracle"], "1");
    let info = json_of(&run(&["--cache", p, "cache", "inspect"]));
    assert_eq!(info["entries"], 1);
    assert_eq!(info["by_provenance"]["oracle"], 1);
    // a second run answers from the cache with identical output
    assert_eq!(run(&eval).stdout, first.stdout);
    let cleared = json_of(&run(&["--cache", p, "cache", "clear"]));
    assert_eq!(cleared["cleared"], true);
    assert!(!path.exists());
    assert_eq!(json_of(&run(&["--cache", p, "cache", "inspect"]))["entries"], 0);
}

#[test]
fn env_overrides_cache_flag() {
    let dir = tempfile::tempdir().unwrap();
    let flag = dir.path().join("flag.json");
    let env = dir.path().join("env.json");
    let out = run_env(
        &["--cache", flag.to_str().unwrap(), "gw-eval", "--target", "g:2,4", "--d", "0", "--classes", "1|1|1,1", "--method", "oracle"],
        &env,
    );
    assert_eq!(json_of(&out)["oracle"], "1");
    assert!(env.exists());
    assert!(!flag.exists());
}

#[test]
fn stale_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("old.json");
    std::fs::write(
        &path,
        r#"[{"schema_version":0,"target":"g:2,4","degree":1,"insertions":[[2],[1,1],[2,2]],"value":"1","provenance":"oracle"}]"#,
    )
    .unwrap();
    let out = run(&["--cache", path.to_str().unwrap(), "cache", "inspect"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_commands_pass() {
    assert_eq!(json_of(&run(&["ledger-h4", "--d", "8"]))["balanced"], true);
    assert_eq!(json_of(&run(&["transfer", "--d", "4"]))["ok"], true);
    let f = json_of(&run(&["census-flag", "--target", "g:2,4", "--n", "0", "--deg", "2"]));
    assert_eq!(f["total"], f["dim_h2"]);
}
