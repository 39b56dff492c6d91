use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chaingeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaingeom")).args(args).output().expect("binary runs")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    all.extend(["--out", &path]);
    let out = chaingeom(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn generate_counts() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "l.json", &["lattice1p1", "--width", "5", "--ticks", "40"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(doc["events"].as_array().unwrap().len(), 246);
    let p = generate(dir.path(), "s.json", &["simplex", "--chains", "4", "--ticks", "10"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(doc["chains"].as_array().unwrap().len(), 4);
    assert_eq!(doc["events"].as_array().unwrap().len(), 44);
    assert_eq!(doc["chains"][0]["valuations"][1], "1/1");
}

#[test]
fn bad_generator_params() {
    let out = chaingeom(&["generate", "randomdag", "--n", "50", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(chaingeom(&["generate", "torus"]).status.code(), Some(2));
}

#[test]
fn classify_lattice_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "l.json", &["lattice1p1", "--width", "5", "--ticks", "30"]);
    let out = chaingeom(&["classify", &p, "0", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["summary"]["legal_codes_only"], true);
    let hist = v["histogram"].as_object().unwrap();
    let legal = ["2201", "1010", "0122", "0221", "2102"];
    assert!(hist.keys().all(|k| legal.contains(&k.as_str()) || k == "undefined" || k.contains('(')));
    assert_eq!(v["events"].as_array().unwrap().len(), 6 * 31);

    let out = chaingeom(&["classify", &p, "0", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("code,count"));

    assert_eq!(chaingeom(&["classify", &p, "0", "0"]).status.code(), Some(2));
    assert_eq!(chaingeom(&["classify", &p, "0", "nope"]).status.code(), Some(2));
}

#[test]
fn classify_random_dag_reports_illegal_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "r.json", &["randomdag", "--n", "100", "--p", "0.12", "--seed", "1"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let ids: Vec<String> =
        doc["chains"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap().to_string()).collect();
    let mut any_illegal = false;
    for a in &ids {
        for b in &ids {
            if a != b {
                let v = json(&chaingeom(&["classify", &p, a, b]));
                any_illegal |= v["summary"]["legal_codes_only"] == false;
            }
        }
    }
    assert!(any_illegal);
}

#[test]
fn classify_empty_poset() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("e.json");
    std::fs::write(&p, r#"{"events":[],"covers":[],"chains":[]}"#).unwrap();
    let v = json(&chaingeom(&["classify", p.to_str().unwrap(), "a", "b"]));
    assert!(v["histogram"].as_object().unwrap().is_empty());
}

#[test]
fn verify_suites() {
    let out = chaingeom(&["verify", "pythagoras", "--max-leg", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let check = &v["suites"][0]["checks"][0];
    assert!(check["value"].as_str().unwrap().contains('/'));
    assert!(check.get("inputs").is_some() && check.get("pass").is_some());

    let out = chaingeom(&["verify", "geoproduct"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(chaingeom(&["verify", "nosuchsuite"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        v["wall_time_ms"] = Value::Null;
        for s in v["suites"].as_array_mut().unwrap() {
            s["wall_time_ms"] = Value::Null;
        }
        v
    };
    let a = strip(json(&chaingeom(&["verify", "parallel", "--trials", "50", "--seed", "7"])));
    let b = strip(json(&chaingeom(&["verify", "parallel", "--trials", "50", "--seed", "7"])));
    assert_eq!(a, b);
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(
        &p,
        r#"{"events":[0,1,2],"covers":[[0,1],[1,2]],"chains":[{"id":"a","events":[0,1,2],"valuations":["0/1","1/2","1/1"]}]}"#,
    )
    .unwrap();
    let p = p.to_str().unwrap();
    let out = chaingeom(&["export", p, "--format", "dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph {"));
    assert_eq!(dot.matches("->").count(), 2);

    let round = dir.path().join("round.json");
    let out = chaingeom(&["export", p, "--format", "json", "--out", round.to_str().unwrap()]);
    assert!(out.status.success());
    let again = dir.path().join("again.json");
    chaingeom(&["export", round.to_str().unwrap(), "--format", "json", "--out", again.to_str().unwrap()]);
    let (r, g) = (std::fs::read_to_string(&round).unwrap(), std::fs::read_to_string(&again).unwrap());
    assert_eq!(r, g);
    assert!(r.contains("\"1/2\""));

    assert_eq!(chaingeom(&["export", p, "--format", "xml"]).status.code(), Some(2));
    assert_eq!(chaingeom(&["export", "/no/such/file.json", "--format", "dot"]).status.code(), Some(2));
}
