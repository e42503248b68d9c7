use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn padist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("json")
}

fn diagnostic(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("json diagnostic")
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pair_dirac_with_square() {
    let o = padist(&["pair", "--dirac", "2", "--poly", "x^2"]);
    assert_eq!(json_out(&o)["value"], "4");
    let o = padist(&[
        "pair",
        "--derivative",
        "--poly",
        "x^3 + 5x - 2",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("5,"));
}

#[test]
fn binom_audit_csv() {
    let o = padist(&["binom-audit", "-p", "3", "-n", "0", "--kmax", "26"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,n,k,formula_valuation,oracle_valuation,witness_b,witness_c,agrees"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 27);
    for r in &rows {
        let k: u64 = r[2].parse().unwrap();
        // the oracle never goes negative; the closed form does from k = 9 on
        assert_eq!(r[4], "0");
        assert_eq!(r[7] == "true", k < 9, "{r:?}");
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let o = padist(&["binom-audit", "--kmax", "3", "--kmin", "10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let o = padist(&["--precision", "2", "mahler", "--poly", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["error"], "parse");
    assert_eq!(
        padist(&["-p", "4", "mahler", "--poly", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        padist(&["--trunc", "4", "mahler", "--poly", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        padist(&["--degree", "1", "comult-check", "--lattice", "heisenberg"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(padist(&["mahler", "--poly", "x^^2"]).status.code(), Some(2));
    assert_eq!(padist(&["no-such-command"]).status.code(), Some(2));

    let o = padist(&["binom-audit", "--kmax", "40", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["error"], "precision");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &json!({"p": 3, "precision": 10, "rows": [["2", "0"], ["0", "1"]]}),
    );
    let o = padist(&["lps-level", "--x", s(&bad)]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(diagnostic(&o)["error"], "invariant");
}

#[test]
fn mahler_and_classify() {
    let o = padist(&["mahler", "--poly", "x^2", "--trunc", "12"]);
    let v = json_out(&o);
    let values: Vec<&str> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["value"].as_str().unwrap())
        .collect();
    assert_eq!(&values[..4], ["0", "1", "2", "0"]);
    assert!(v["decay"]["slope"].is_string());

    let short = json_out(&padist(&["mahler", "--poly", "x", "--K", "8"]));
    assert!(short["decay"].is_null());

    let v = json_out(&padist(&["classify", "--poly", "x^3 + 1", "--level", "2"]));
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn table_inputs() {
    let dir = tempfile::tempdir().unwrap();
    // f(x) = x^2 on 0..=12 as a value table
    let values: Vec<String> = (0..=12).map(|x: i64| (x * x).to_string()).collect();
    let table = write(
        dir.path(),
        "f.json",
        &json!({"p": 3, "precision": 20, "values": values}),
    );
    let from_table = json_out(&padist(&["mahler", "--table", s(&table)]));
    let from_poly = json_out(&padist(&["mahler", "--poly", "x^2", "--trunc", "12"]));
    assert_eq!(from_table["coefficients"], from_poly["coefficients"]);

    let v = json_out(&padist(&[
        "pair",
        "--dirac",
        "5",
        "--fn",
        s(&table),
        "--trunc",
        "12",
    ]));
    assert_eq!(v["value"], "25");

    let coeffs: Vec<String> = (0..40)
        .map(|i| format!("{}", 3i128.pow(i as u32 % 20)))
        .collect();
    let c = write(
        dir.path(),
        "a.json",
        &json!({"p": 3, "precision": 40, "values": coeffs}),
    );
    let v = json_out(&padist(&["dmn", "--m", "1", "--n", "0", "--coeffs", s(&c)]));
    assert_eq!(v["b_valuations"].as_array().unwrap().len(), 40);

    let wrong_prime = write(
        dir.path(),
        "g.json",
        &json!({"p": 5, "precision": 20, "values": ["1"]}),
    );
    assert_eq!(
        padist(&["mahler", "--table", s(&wrong_prime)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn group_commands() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        &json!({"p": 3, "precision": 10, "rows": [["4", "3"], ["0", "1"]]}),
    );
    let y = write(
        dir.path(),
        "y.json",
        &json!({"p": 3, "precision": 10, "rows": [["1", "0"], ["3", "7"]]}),
    );
    let v = json_out(&padist(&["group-add", "--x", s(&x), "--y", s(&y)]));
    let trace: Vec<i64> = v["trace"]["discrepancy_valuations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_i64().unwrap())
        .collect();
    assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(*trace.last().unwrap(), 10);
    assert_eq!(v["limit"]["precision"], 10);

    let v = json_out(&padist(&[
        "group-bracket",
        "--x",
        s(&x),
        "--y",
        s(&y),
        "--t-max",
        "8",
    ]));
    assert_eq!(
        v["trace"]["discrepancy_valuations"]
            .as_array()
            .unwrap()
            .len(),
        9
    );

    let v = json_out(&padist(&[
        "bch",
        "--x",
        s(&x),
        "--y",
        s(&y),
        "--degree",
        "6",
    ]));
    assert!(v["discrepancy_valuation"].as_i64().unwrap() >= 4);

    let v = json_out(&padist(&["lps-level", "--x", s(&x)]));
    assert_eq!(v["level"], 1);
}

#[test]
fn lattices() {
    assert_eq!(
        json_out(&padist(&["powerful-check", "--lattice", "pM2"]))["powerful"],
        true
    );
    assert_eq!(
        json_out(&padist(&["powerful-check", "--lattice", "M2"]))["powerful"],
        false
    );
    let dir = tempfile::tempdir().unwrap();
    let basis = write(
        dir.path(),
        "b.json",
        &json!([
            {"p": 3, "precision": 10, "rows": [["0", "3"], ["0", "0"]]},
            {"p": 3, "precision": 10, "rows": [["0", "0"], ["3", "0"]]},
            {"p": 3, "precision": 10, "rows": [["3", "0"], ["0", "-3"]]},
        ]),
    );
    assert_eq!(
        json_out(&padist(&["powerful-check", "--basis", s(&basis)]))["powerful"],
        true
    );

    let v = json_out(&padist(&[
        "comult-check",
        "--lattice",
        "heisenberg",
        "--degree",
        "6",
        "--scale",
        "1",
    ]));
    assert_eq!(v["coassociativity"], json!([null, null, null]));
    assert_eq!(v["integrality"]["integral"], true);
    let v = json_out(&padist(&[
        "-p",
        "5",
        "comult-check",
        "--lattice",
        "sl2",
        "--degree",
        "5",
    ]));
    assert_eq!(v["counit"], true);

    let mut c = vec![vec![vec!["0"; 2]; 2]; 2];
    c[0][1][0] = "1";
    let s_bad = write(dir.path(), "s.json", &json!({"p": 3, "constants": c}));
    let o = padist(&["comult-check", "--structure", s(&s_bad)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn deterministic_output() {
    let args = ["acceptance", "--only", "2,5", "--format", "csv"];
    let strip = |o: Output| -> Vec<String> {
        // drop the timing column
        stdout(&o)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(strip(padist(&args)), strip(padist(&args)));
    let a = padist(&["mahler", "--poly", "7x^5 - x", "--trunc", "16"]);
    let b = padist(&["mahler", "--poly", "7x^5 - x", "--trunc", "16"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn acceptance_subset_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = padist(&["acceptance", "--only", "3,10", "--out", s(&out)]);
    assert!(o.status.success());
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert_eq!(
        stderr.lines().filter(|l| l.starts_with("[PASS]")).count(),
        2
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(
        padist(&["acceptance", "--only", "12"]).status.code(),
        Some(2)
    );
}
