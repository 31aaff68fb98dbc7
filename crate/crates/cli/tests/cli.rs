use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn icnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icnc")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = icnc(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const THREE_CYCLE: &str = "n=3\n1 : 2\n2 : 3\n3 : 1\n";
const FIVE_CYCLE: &str = "n=5\n1 : 2 5\n2 : 1 3\n3 : 2 4\n4 : 3 5\n5 : 4 1\n";

#[test]
fn bounds_of_small_graphs() {
    let dir = TempDir::new().unwrap();
    let c3 = write(&dir, "c3.sig", THREE_CYCLE);
    let v = ok_json(&["bounds", s(&c3)]);
    assert_eq!((v["mais"].as_u64(), v["tau"].as_u64(), v["nu"].as_u64()), (Some(2), Some(1), Some(1)));
    assert_eq!(v["minrank2"], 2);

    let empty = write(&dir, "e.sig", "n=3\n");
    let v = ok_json(&["bounds", s(&empty)]);
    assert_eq!((v["mais"].as_u64(), v["tau"].as_u64(), v["nu"].as_u64()), (Some(3), Some(0), Some(0)));
    assert_eq!(v["minrank2"], 3);

    let c5 = write(&dir, "c5.sig", FIVE_CYCLE);
    let v = ok_json(&["bounds", s(&c5)]);
    assert_eq!((v["mais"].as_u64(), v["tau"].as_u64()), (Some(2), Some(3)));
    assert_eq!(v["minrank2"], 3);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.sig", "not a graph\n");
    assert_eq!(icnc(&["bounds", s(&bad)]).status.code(), Some(2));
    assert_eq!(icnc(&["bounds", "/nonexistent.sig"]).status.code(), Some(2));
    assert_eq!(icnc(&["nonsense"]).status.code(), Some(2));
    assert_eq!(icnc(&["bounds", s(&bad), "--path-limit", "0"]).status.code(), Some(2));

    let c5 = write(&dir, "c5.sig", FIVE_CYCLE);
    let out = icnc(&["bounds", s(&c5), "--cycle-limit", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
    assert_eq!(icnc(&["bounds", s(&c5), "--format", "dot"]).status.code(), Some(2));
}

#[test]
fn transform_dumps() {
    let dir = TempDir::new().unwrap();
    let c3 = write(&dir, "c3.sig", THREE_CYCLE);
    let v = ok_json(&["transform", s(&c3), "--vtau", "1"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(v["sources"], serde_json::json!([1]));

    // default source set is the first minimum feedback vertex set
    let c5 = write(&dir, "c5.sig", FIVE_CYCLE);
    let v = ok_json(&["transform", s(&c5)]);
    assert_eq!(v["sources"], serde_json::json!([1, 2, 4]));

    let out = icnc(&["transform", s(&c3), "--vtau", "1", "--format", "dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph G {\n"));
    assert!(dot.contains("\"1\" -> \"1'\" [style=solid];"));
    assert!(dot.contains("[style=dashed]"));

    let out = icnc(&["transform", s(&c3), "--vtau", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    // removing vertex 1 of a bidirected 5-cycle leaves cycles behind
    assert_eq!(icnc(&["transform", s(&c5), "--vtau", "1"]).status.code(), Some(2));
}

#[test]
fn classify_reports() {
    let dir = TempDir::new().unwrap();
    let out = icnc(&["gen", "A", "S23"]);
    let a23 = write(&dir, "a23.sig", &String::from_utf8(out.stdout).unwrap());
    let v = ok_json(&["classify", s(&a23)]);
    assert_eq!(v["verdict"], "class_ia");
    assert_eq!(v["skeleton"]["style"], "A");
    assert_eq!(v["reduced_id"], "S23");

    let c3 = write(&dir, "c3.sig", THREE_CYCLE);
    assert_eq!(ok_json(&["classify", s(&c3)])["verdict"], "not_tau3");

    let c5 = write(&dir, "c5.sig", FIVE_CYCLE);
    let v = ok_json(&["classify", s(&c5)]);
    assert_eq!(v["tau"], 3);
    assert_ne!(v["verdict"], "class_ia");
}

#[test]
fn solve_then_verify() {
    let dir = TempDir::new().unwrap();
    let out = icnc(&["gen", "B", "S21"]);
    let g = write(&dir, "b21.sig", &String::from_utf8(out.stdout).unwrap());
    let sol = dir.path().join("sol.json");
    assert_eq!(icnc(&["solve", s(&g), "-o", s(&sol)]).status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    let n = v["n"].as_u64().unwrap();
    assert_eq!(v["length"].as_u64(), Some(n - 3));
    assert_eq!((v["valid"].as_bool(), v["optimal"].as_bool()), (Some(true), Some(true)));
    assert_eq!(v["method"], "class_ia_table");

    let r = ok_json(&["verify", s(&g), s(&sol)]);
    assert_eq!((r["valid"].as_bool(), r["optimality"].as_str()), (Some(true), Some("optimal")));

    // the network code dump alone dualizes to a valid code as well
    let nc = write(&dir, "nc.json", &v["network_code"].to_string());
    let r = ok_json(&["verify", s(&g), s(&nc)]);
    assert_eq!(r["valid"], true);
    assert_eq!(r["length"].as_u64(), Some(n - 3));
}

#[test]
fn verify_plain_rows() {
    let dir = TempDir::new().unwrap();
    let c3 = write(&dir, "c3.sig", THREE_CYCLE);
    let id = write(&dir, "id.json", r#"["100", "010", "001"]"#);
    let r = ok_json(&["verify", s(&c3), s(&id)]);
    assert_eq!(r["valid"], true);
    assert_ne!(r["optimality"], "optimal");

    let good = write(&dir, "good.json", r#"{"cols": 3, "rows": ["110", "011"]}"#);
    assert_eq!(ok_json(&["verify", s(&c3), s(&good)])["optimality"], "optimal");

    let bad = write(&dir, "bad.json", r#"["111"]"#);
    let out = icnc(&["verify", s(&c3), s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["valid"], false);

    let wide = write(&dir, "wide.json", r#"["1100"]"#);
    assert_eq!(icnc(&["verify", s(&c3), s(&wide)]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let a = icnc(&["gen", "A", "S24", "--seed", "1"]);
    let b = icnc(&["gen", "A", "S24", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().starts_with("n="));

    let fixture = icnc(&["gen", "--fixture", "illegitimate10"]);
    assert_eq!(fixture.status.code(), Some(0));
    assert_eq!(icnc(&["gen", "C", "S21"]).status.code(), Some(2));
    assert_eq!(icnc(&["gen", "A"]).status.code(), Some(2));
}
