//! End-to-end tests of the binary: files, formats, and exit codes.

use sha2::{Digest, Sha256};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubeshadows"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn construct_majority_bytes_are_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m3.spart");
    let out = run(&["construct", "--kind", "majority", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = std::fs::read(&path).unwrap();
    let expected: Vec<u8> = [
        b"SPART1\n".to_vec(),
        3u32.to_le_bytes().to_vec(),
        2u32.to_le_bytes().to_vec(),
        2u32.to_le_bytes().to_vec(),
        vec![1, 1, 1, 2, 1, 2, 2, 2],
    ]
    .concat();
    assert_eq!(bytes, expected);
}

#[test]
fn construct_power_digest_is_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m5cubed.spart");
    let out = run(&[
        "construct",
        "--kind",
        "power",
        "--base",
        "majority",
        "--base-n",
        "5",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 7 + 12 + 32768);
    let digest = hex(&Sha256::digest(&bytes));
    assert_eq!(
        digest,
        "ff4fecc394ff2f52068d9dda925c2d7ec0a71fa897392b2adc94b728f38dd405"
    );
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn eval_roundtrip_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m3.spart");
    assert!(run(&["construct", "--kind", "majority", "--n", "3", "--out", path.to_str().unwrap()])
        .status
        .success());
    let out = run(&[
        "eval",
        "--in",
        path.to_str().unwrap(),
        "--d",
        "2",
        "--influence",
        "1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["mpv"]["num"], "3");
    assert_eq!(doc["mpv"]["den"], "4");
    assert_eq!(doc["geometry"]["n"], 3);
    assert_eq!(doc["influence"]["max"]["num"], "1");
    assert_eq!(doc["influence"]["max"]["den"], "2");
    assert_eq!(doc["balance_deviation"]["num"], "0");
}

#[test]
fn eval_csv_is_stable() {
    let out1 = run(&["eval", "--kind", "majority", "--n", "3", "--d", "2", "--format", "csv"]);
    let out2 = run(&["eval", "--kind", "majority", "--n", "3", "--d", "2", "--format", "csv"]);
    assert!(out1.status.success());
    assert_eq!(stdout(&out1), stdout(&out2));
    assert!(stdout(&out1).starts_with("part,coords,num,den,decimal\n"));
    assert!(stdout(&out1).contains("2,2 3,3,4,0.750000"));
}

#[test]
fn adjusted_tribes_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t22adj.spart");
    let out = run(&[
        "construct",
        "--kind",
        "adjusted",
        "--base",
        "tribes",
        "--base-w",
        "2",
        "--base-s",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["eval", "--in", path.to_str().unwrap(), "--d", "3", "--format", "json", "--check-bounds"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["balance_deviation"]["num"], "0");
    let checks = doc["bounds"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn sauer_shelah_eval_and_construct() {
    // The n=3 instance happens to be disjoint, so construct succeeds.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ss.spart");
    let out = run(&[
        "construct", "--kind", "sauer-shelah", "--n", "3", "--grid", "2", "--c", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["eval", "--in", path.to_str().unwrap(), "--d", "2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["mpv"]["num"], "3");
    assert_eq!(doc["mpv"]["den"], "4");
    // The n=4, c=2 instance overlaps, so construct refuses but eval works.
    let out = run(&[
        "construct", "--kind", "sauer-shelah", "--n", "4", "--grid", "2", "--c", "2", "--out",
        dir.path().join("ss4.spart").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["eval", "--kind", "sauer-shelah", "--n", "4", "--grid", "2", "--c", "2", "--d", "3"]);
    assert!(out.status.success());
}

#[test]
fn usage_and_corrupt_files_exit_2() {
    // Unknown table kind.
    assert_eq!(run(&["table", "--kind", "nope"]).status.code(), Some(2));
    // Unknown verify suite.
    assert_eq!(run(&["verify", "bogus", "--count", "1"]).status.code(), Some(2));
    // Bad projection dimension.
    assert_eq!(
        run(&["eval", "--kind", "majority", "--n", "3", "--d", "0"]).status.code(),
        Some(2)
    );
    // Corrupt file.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.spart");
    std::fs::write(&path, b"NOTSPART").unwrap();
    assert_eq!(
        run(&["eval", "--in", path.to_str().unwrap(), "--d", "1"]).status.code(),
        Some(2)
    );
    // Divisibility failure in hypercube.
    assert_eq!(
        run(&["construct", "--kind", "hypercube", "--n", "3", "--r", "3", "--grid", "2",
              "--out", dir.path().join("x.spart").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_all_passes_quickly() {
    let out = run(&["verify", "all", "--count", "40", "--seed", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "influence-projection",
        "uniform-cover",
        "sauer-shelah",
        "product-factorization",
        "boolean-upper-bound",
    ] {
        assert!(text.contains(&format!("{name}: 40/40 passed")), "{text}");
    }
}

#[test]
fn search_writes_witness_file(){
    let dir = tempfile::tempdir().unwrap();
    let witness = dir.path().join("w.spart");
    let out = run(&[
        "search", "--n", "3", "--grid", "2", "--c", "2", "--d", "2",
        "--out-witness", witness.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["best"]["num"], "3");
    assert_eq!(doc["best"]["den"], "4");
    assert_eq!(doc["optimal"], true);
    assert!(Path::new(&witness).exists());
    // The witness file evaluates to the reported minimum.
    let out = run(&["eval", "--in", witness.to_str().unwrap(), "--d", "2", "--format", "json"]);
    let eval_doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(eval_doc["mpv"], doc["best"]);
}

#[test]
fn product_via_files() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = dir.path().join("m3.spart");
    assert!(run(&["construct", "--kind", "majority", "--n", "3", "--out", m3.to_str().unwrap()])
        .status
        .success());
    let prod = dir.path().join("m3sq.spart");
    let out = run(&[
        "construct", "--kind", "product",
        "--lhs", m3.to_str().unwrap(),
        "--rhs", m3.to_str().unwrap(),
        "--out", prod.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["eval", "--in", prod.to_str().unwrap(), "--d", "5", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["mpv"]["num"], "3");
    assert_eq!(doc["mpv"]["den"], "8");
    assert_eq!(doc["colors"], 4);
}

#[test]
fn conjecture_report_on_majority_power() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m5cubed.spart");
    assert!(run(&[
        "construct", "--kind", "power", "--base", "majority", "--base-n", "5", "--k", "3",
        "--out", path.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&[
        "conjecture", "--b", "1/5", "--n", "15", "--delta", "1/100",
        "--in", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["colors"], 8);
    // c * mpv - 1 = 8 * 11/64 - 1 = 3/8.
    assert_eq!(doc["partition"]["measured_excess"]["num"], "3");
    assert_eq!(doc["partition"]["measured_excess"]["den"], "8");
    // The reference excess scale b*log2(1/b) at b = 1/5.
    assert_eq!(doc["excess_term_decimal"], "0.464386");
    // No pass/fail semantics anywhere in the document.
    assert!(doc.get("pass").is_none());
}

#[test]
fn rho21_empty_range_is_header_only() {
    let out = run(&["table", "--kind", "rho21", "--c-min", "5", "--c-max", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "c,num,den,decimal,ceiling_crosscheck\n");
}

#[test]
fn rho21_csv_bytes_are_frozen() {
    let out = run(&["table", "--kind", "rho21", "--c-min", "1", "--c-max", "15"]);
    assert!(out.status.success());
    let expected = "\
c,num,den,decimal,ceiling_crosscheck
1,1,1,1.00000,ok
2,1,1,1.00000,ok
3,2,3,0.666667,ok
4,1,2,0.500000,ok
5,1,2,0.500000,ok
6,1,2,0.500000,ok
7,3,7,0.428571,ok
8,3,8,0.375000,ok
9,1,3,0.333333,ok
10,1,3,0.333333,ok
11,1,3,0.333333,ok
12,1,3,0.333333,ok
13,4,13,0.307692,ok
14,2,7,0.285714,ok
15,4,15,0.266667,ok
";
    assert_eq!(stdout(&out), expected);
}
