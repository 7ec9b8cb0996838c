use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn matmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matmono")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not json ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.display().to_string()
}

/// Loewner matrix of t² at {a, b} is [[2a, a+b], [a+b, 2b]]; its eigenvalues
/// are (a+b) ± sqrt((a-b)² + (a+b)²).
fn square_loewner_margin(a: f64, b: f64) -> f64 {
    let r = ((a - b).powi(2) + (a + b).powi(2)).sqrt();
    let (lo, hi) = (a + b - r, a + b + r);
    lo / hi.abs().max(lo.abs()).max(1.0)
}

fn square_certificate(nodes: [f64; 2], margin: f64) -> Value {
    json!({
        "schema": "v1",
        "certificate": {
            "function": "poly:0,0,1",
            "domain": "(0,1)",
            "order": 2,
            "claim": "FAIL",
            "tolerance": 1e-9,
            "margin": margin,
            "payload": { "kind": "node_tuple", "criterion": "loewner", "nodes": nodes }
        }
    })
}

#[test]
fn classify_echoes_the_config() {
    let o = matmono(&["classify", "--fn", "gap:2", "--interval", "0,1", "--order", "2", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_of(&o);
    assert_eq!(r["schema"], "v1");
    assert_eq!(r["config"]["trials"], 1000);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["config"]["function"], "gap:2");
    let class = &r["results"][0];
    assert_eq!(class["record"], "class");
    assert_eq!(class["trials"], 1000);
    assert!(matches!(class["verdict"].as_str(), Some("PASS" | "FAIL")));
}

#[test]
fn prop35_suite_splits() {
    let o = matmono(&["suite", "--name", "prop35", "--trials", "500"]);
    assert_eq!(code(&o), 0);
    let r = json_of(&o);
    let split = &r["results"][0];
    assert_eq!(split["record"], "split");
    assert_eq!(split["reproduced"], true);
    assert_eq!(split["quotient"]["verdict"], "PASS");
    assert_eq!(split["convexity"]["verdict"], "FAIL");
}

#[test]
fn identical_configs_give_identical_reports() {
    let args = ["jensen", "--fn", "poly:0,0,0,1", "--order", "2", "--trials", "300", "--seed", "5"];
    let strip = |o: &Output| {
        let mut v = json_of(o);
        v["wall_clock"] = Value::Null;
        serde_json::to_vec(&v).unwrap()
    };
    let (a, b) = (matmono(&args), matmono(&args));
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn recheck_confirms_a_square_node_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let m = square_loewner_margin(0.25, 0.75);
    assert!(m < 0.0);
    let path = write_json(dir.path(), "cert.json", &square_certificate([0.25, 0.75], m));
    let o = matmono(&["recheck", &path]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = json_of(&o);
    let rec = &r["results"][0];
    assert_eq!(rec["consistent"], true);
    let recomputed = rec["recomputed_margin"].as_f64().unwrap();
    assert!(recomputed < 0.0);
    assert!((recomputed - m).abs() <= 1e-12);
}

#[test]
fn tampered_payload_fails_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let m = square_loewner_margin(0.25, 0.75);
    // the nodes no longer reproduce the stored margin
    let path = write_json(dir.path(), "cert.json", &square_certificate([0.25, 0.5], m));
    assert_eq!(code(&matmono(&["recheck", &path])), 1);
    // a positive semidefinite claim dressed as a failure
    let mut cert = square_certificate([0.25, 0.75], m);
    cert["certificate"]["function"] = json!("poly:0,1");
    let path = write_json(dir.path(), "cert2.json", &cert);
    assert_eq!(code(&matmono(&["recheck", &path])), 1);
}

#[test]
fn recheck_of_a_measure_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = matmono(&[
        "cn", "--fn", "poly:0,1", "--points", "0.2,0.5,0.8", "--order", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cert = &r["results"][0]["certificate"];
    assert_eq!(cert["payload"]["kind"], "measure");
    assert!(cert["margin"].as_f64().unwrap().abs() <= 1e-7);
    let o = matmono(&["recheck", out.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("OK"));
}

#[test]
fn cn_parses_on_the_unit_interval() {
    let o = matmono(&["cn", "--fn", "moebius:1,0,-1,1", "--points", "0.2,0.5,0.8", "--format", "text"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().starts_with("PASS"));
}

#[test]
fn report_files_recheck_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cube.json");
    let o = matmono(&[
        "classify", "--fn", "poly:0,0,0,1", "--interval", "[0,1)", "--order", "2", "--property", "convex",
        "--trials", "500", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let o = matmono(&["recheck", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_of(&o)["results"][0]["certificate"]["claim"], "FAIL");
}

#[test]
fn schema_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cert = square_certificate([0.25, 0.75], square_loewner_margin(0.25, 0.75));
    cert["schema"] = json!("v0");
    let path = write_json(dir.path(), "old.json", &cert);
    let o = matmono(&["recheck", &path]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn usage_errors_exit_two() {
    let o = matmono(&["classify", "--fn", "poly:0,,1", "--interval", "0,1", "--order", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
    assert_eq!(code(&matmono(&["classify", "--bogus"])), 2);
    assert_eq!(code(&matmono(&["classify", "--fn", "poly:0,1", "--interval", "0,1"])), 2);
    assert_eq!(code(&matmono(&["suite", "--name", "nope"])), 2);
    assert_eq!(code(&matmono(&["classify", "--fn", "poly:0,1", "--interval", "0,1", "--order", "0"])), 2);
}

#[test]
fn csv_and_text_formats() {
    let args = ["classify", "--fn", "poly:0,0,1", "--interval", "0,1", "--order", "2", "--trials", "200"];
    let o = matmono(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("function,interval,order,route,verdict,margin,trials,seed"));
    let row = lines.next().unwrap();
    assert!(row.contains("loewner_dd") && row.contains("FAIL"), "{row}");

    let o = matmono(&[&args[..], &["--format", "text"]].concat());
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.starts_with("FAIL"));
    let digest = line.rsplit(' ').next().unwrap();
    assert_eq!(digest.len(), 12);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
}
