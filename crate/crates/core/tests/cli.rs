use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_colligations");

const SWAP: &str = r#"{"kind":"colligation","alpha":1,"inner":1,
  "matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}"#;
const IDENTITY: &str = r#"{"kind":"colligation","alpha":1,"inner":1,
  "matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
const SWAP_PAIR: &str = r#"{"kind":"multi","alpha":1,"inner":1,"members":[
  [[[0,0],[1,0]],[[1,0],[0,0]]],
  [[[0,0],[1,0]],[[1,0],[0,0]]]]}"#;
const IDENTITY_PAIR: &str = r#"{"kind":"multi","alpha":1,"inner":1,"members":[
  [[[1,0],[0,0]],[[0,0],[1,0]]],
  [[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn entry(value: &Value, i: usize, j: usize) -> (f64, f64) {
    let z = &value[i][j];
    (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())
}

#[test]
fn validate_accepts_identity() {
    let dir = TempDir::new().unwrap();
    let out = run(&["validate", p(&write(&dir, "id.json", IDENTITY))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["valid"], true);
}

#[test]
fn validate_rejects_non_unitary() {
    let dir = TempDir::new().unwrap();
    let doc = IDENTITY.replacen("[[1,0],[0,0]]", "[[2,0],[0,0]]", 1);
    let out = run(&["validate", p(&write(&dir, "two.json", &doc))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotUnitary"));
}

#[test]
fn validate_rejects_truncated_json() {
    let dir = TempDir::new().unwrap();
    let out = run(&["validate", p(&write(&dir, "cut.json", &IDENTITY[..40]))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn swap_squared_is_z_squared() {
    let dir = TempDir::new().unwrap();
    let swap = write(&dir, "swap.json", SWAP);
    let prod = dir.path().join("prod.json");
    let out = run(&["--out", p(&prod), "product", p(&swap), p(&swap)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["eval", p(&prod), "--point", "[0.5, 0]"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = entry(&records(&out)[0]["value"], 0, 0);
    assert!((re - 0.25).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn product_with_identity_keeps_chi() {
    let dir = TempDir::new().unwrap();
    let doc = write(
        &dir,
        "a.json",
        &String::from_utf8(run(&["random", "colligation", "--alpha", "2", "--inner", "2", "--seed", "4"]).stdout)
            .unwrap(),
    );
    let id = r#"{"kind":"colligation","alpha":2,"inner":1,"matrix":[
      [[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]}"#;
    let id = write(&dir, "id.json", id);
    let prod = dir.path().join("prod.json");
    assert_eq!(
        run(&["--out", p(&prod), "product", p(&doc), p(&id)]).status.code(),
        Some(0)
    );
    for z in ["[0.3, 0.2]", "[-0.5, 0.1]", "[2, -1]"] {
        let a = records(&run(&["eval", p(&doc), "--point", z]))[0]["value"].clone();
        let b = records(&run(&["eval", p(&prod), "--point", z]))[0]["value"].clone();
        for i in 0..2 {
            for j in 0..2 {
                let (x, y) = (entry(&a, i, j), entry(&b, i, j));
                assert!((x.0 - y.0).abs() < 1e-10 && (x.1 - y.1).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn product_kind_mismatch_exits_3() {
    let dir = TempDir::new().unwrap();
    let multi = write(&dir, "m.json", SWAP_PAIR);
    let tri = run(&[
        "random", "tri", "--alpha", "1", "--inner", "1", "--n", "2", "--seed", "0",
    ]);
    let tri = write(&dir, "t.json", &String::from_utf8(tri.stdout).unwrap());
    assert_eq!(run(&["product", p(&multi), p(&tri)]).status.code(), Some(3));
}

#[test]
fn swap_eval_at_half() {
    let dir = TempDir::new().unwrap();
    let out = run(&["eval", p(&write(&dir, "swap.json", SWAP)), "--point", "[0.5, 0]"]);
    let rec = &records(&out)[0];
    assert_eq!(rec["regular"], true);
    let (re, im) = entry(&rec["value"], 0, 0);
    assert!((re - 0.5).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn swap_pair_inverts_its_argument() {
    let dir = TempDir::new().unwrap();
    let s = "[[[0,0],[1,0]],[[1,0],[0,0]]]";
    let out = run(&["eval", p(&write(&dir, "sp.json", SWAP_PAIR)), "--point", s]);
    assert_eq!(out.status.code(), Some(0));
    let value = &records(&out)[0]["value"];
    for (i, j, want) in [(0, 0, 0.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 0.0)] {
        let (re, im) = entry(value, i, j);
        assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
    }
}

#[test]
fn identity_pair_at_identity_is_singular() {
    let dir = TempDir::new().unwrap();
    let s = "[[[1,0],[0,0]],[[0,0],[1,0]]]";
    let out = run(&["eval", p(&write(&dir, "ip.json", IDENTITY_PAIR)), "--point", s]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(records(&out)[0]["regular"], false);
}

#[test]
fn surface_along_scaled_identity() {
    let dir = TempDir::new().unwrap();
    let doc = write(&dir, "sp.json", SWAP_PAIR);
    let grid = r#"{"variable":"S","shape":{"segment":{
      "start":[[[0,0],[0,0]],[[0,0],[0,0]]],
      "direction":[[[1,0],[0,0]],[[0,0],[1,0]]],
      "t_re":[-1,1],"t_im":[0,0],"resolution":[5,1]}}}"#;
    let out = run(&["surface", p(&doc), "--grid", grid]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    for (rec, t) in recs.iter().zip([-1.0f64, -0.5, 0.0, 0.5, 1.0]) {
        assert!((rec["abs_det"].as_f64().unwrap() - t * t).abs() < 1e-12);
    }
    let swap = write(&dir, "swap.json", SWAP);
    assert_eq!(run(&["surface", p(&swap), "--grid", grid]).status.code(), Some(3));
}

#[test]
fn unknown_suite_exits_3() {
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(3));
}

#[test]
fn verify_reports_json() {
    let out = run(&["verify", "single-multiplicativity", "--trials", "5", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    assert_eq!(rec["suite"], "single-multiplicativity");
    assert_eq!(rec["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn emitted_documents_round_trip() {
    let dir = TempDir::new().unwrap();
    for kind in ["colligation", "multi", "tri", "doublecoset"] {
        let first = run(&[
            "random", kind, "--alpha", "2", "--inner", "2", "--n", "2", "--seed", "9",
        ])
        .stdout;
        let path = write(&dir, "doc.json", &String::from_utf8(first).unwrap());
        let prod = dir.path().join("again.json");
        assert_eq!(run(&["validate", p(&path)]).status.code(), Some(0), "{kind}");
        // Multiplying and reparsing must also validate.
        assert_eq!(
            run(&["--out", p(&prod), "product", p(&path), p(&path)]).status.code(),
            Some(0),
            "{kind}"
        );
        assert_eq!(run(&["validate", p(&prod)]).status.code(), Some(0), "{kind}");
    }
}
