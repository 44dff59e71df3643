//! End-to-end runs of the binary: exit codes, output shapes, and agreement
//! between the two output formats.

use std::io::Write as _;
use std::process::{Command, Output};

fn spec_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

fn ut3_spec() -> tempfile::NamedTempFile {
    spec_file(r#"{"p": 2, "d": 1, "builtin": "ut", "params": [3]}"#)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superdescent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_on_the_reference_group() {
    let spec = ut3_spec();
    let out = run(&["verify", "--spec", spec.path().to_str().unwrap(), "--levels", "1,2"]);
    let text = stdout(&out);
    assert!(out.status.success(), "verify failed:\n{text}");
    assert!(text.contains(": PASS"));
    assert!(!text.contains(": FAIL"));
    assert!(text.lines().last().unwrap().starts_with("verify: "));
}

#[test]
fn info_reports_group_orders() {
    let spec = ut3_spec();
    let out = run(&["info", "--spec", spec.path().to_str().unwrap(), "--levels", "1,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("dimension\t3"));
    assert!(text.contains("1\t8\t5\t5"));
    assert!(text.contains("2\t64\t19\t19"));
}

#[test]
fn table_formats_agree() {
    let spec = ut3_spec();
    let path = spec.path().to_str().unwrap();
    let tsv = run(&["table", "--spec", path, "--levels", "1", "--level", "1"]);
    let json = run(&[
        "table", "--spec", path, "--levels", "1", "--level", "1", "--format", "json",
    ]);
    assert!(tsv.status.success());
    assert!(json.status.success());

    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["level"], 1);
    let chars = doc["characters"].as_array().unwrap();
    let classes = doc["classes"].as_array().unwrap();
    assert_eq!(chars.len(), 5);
    assert_eq!(classes.len(), 5);

    // same data row for row and cell for cell
    let text = stdout(&tsv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2 + chars.len());
    let header: Vec<&str> = lines[0].split('\t').collect();
    let sizes: Vec<&str> = lines[1].split('\t').collect();
    for (k, c) in classes.iter().enumerate() {
        assert_eq!(header[4 + k], c["rep"].as_str().unwrap());
        assert_eq!(sizes[4 + k], c["size"].to_string());
    }
    for (i, ch) in chars.iter().enumerate() {
        let row: Vec<&str> = lines[2 + i].split('\t').collect();
        assert_eq!(row[0], ch["rep"].as_str().unwrap());
        assert_eq!(row[1], ch["degree"].to_string());
        assert_eq!(row[2], ch["norm"].to_string());
        assert_eq!(row[3], ch["mult"].to_string());
        for (k, v) in ch["values"].as_array().unwrap().iter().enumerate() {
            assert_eq!(row[4 + k], v.as_str().unwrap());
        }
    }

    // frozen degrees for the reference group, as a multiset
    let mut degrees: Vec<i64> = chars.iter().map(|c| c["degree"].as_i64().unwrap()).collect();
    degrees.sort_unstable();
    assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
}

#[test]
fn shintani_lists_the_matched_pairs() {
    let spec = ut3_spec();
    let out = run(&[
        "shintani",
        "--spec",
        spec.path().to_str().unwrap(),
        "--levels",
        "1,2",
        "--from",
        "2",
        "--to",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("descent\t2 -> 1"));
    assert!(text.contains("pairs\t5"));
    assert!(text.contains("norm correspondence certified\ttrue"));
    assert!(text.contains("isometry verified\ttrue"));
}

#[test]
fn superdual_reports_both_partitions() {
    let spec = ut3_spec();
    let path = spec.path().to_str().unwrap();
    let out = run(&["superdual", "--spec", path, "--levels", "1,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("superdual classes\t19"));
    assert!(text.contains("serre classes\t64"));
    assert!(text.contains("orbit intersection\ttrue"));

    let json = run(&["superdual", "--spec", path, "--levels", "1,2", "--format", "json"]);
    assert!(json.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["superdual"].as_array().unwrap().len(), 19);
    assert_eq!(doc["serre"].as_array().unwrap().len(), 64);
    assert_eq!(doc["checks"]["orbit_intersection"], true);
}

#[test]
fn malformed_spec_is_an_input_error() {
    let spec = spec_file("this is not json");
    let out = run(&["info", "--spec", spec.path().to_str().unwrap(), "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("error:"));
}

#[test]
fn associativity_violation_is_an_input_error() {
    // (e1·e1)·e1 = e2·e1 = e1 but e1·(e1·e1) = e1·e2 = 0
    let spec = spec_file(
        r#"{"p": 2, "d": 1, "r": 2, "constants": [
            {"i": 1, "j": 1, "k": 2, "coeff": [1]},
            {"i": 2, "j": 1, "k": 1, "coeff": [1]}
        ]}"#,
    );
    let out = run(&["info", "--spec", spec.path().to_str().unwrap(), "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("associativity"), "stderr: {err}");
}

#[test]
fn non_nilpotent_algebra_is_an_input_error() {
    let spec = spec_file(
        r#"{"p": 2, "d": 1, "r": 1, "constants": [
            {"i": 1, "j": 1, "k": 1, "coeff": [1]}
        ]}"#,
    );
    let out = run(&["info", "--spec", spec.path().to_str().unwrap(), "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tight_size_bound_refuses() {
    let spec = ut3_spec();
    let out = run(&[
        "info",
        "--spec",
        spec.path().to_str().unwrap(),
        "--levels",
        "1,2",
        "--size-bound",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("size bound"), "stderr: {err}");
}

#[test]
fn missing_level_in_lattice_fails_cleanly() {
    let spec = ut3_spec();
    let out = run(&[
        "table",
        "--spec",
        spec.path().to_str().unwrap(),
        "--levels",
        "1",
        "--level",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not in the configured lattice"), "stderr: {err}");
}

#[test]
fn divisor_gap_in_levels_is_rejected() {
    let spec = ut3_spec();
    let out = run(&["info", "--spec", spec.path().to_str().unwrap(), "--levels", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("divisor-closed"), "stderr: {err}");
}
