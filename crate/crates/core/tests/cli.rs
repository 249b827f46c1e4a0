use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpn-degrees"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_human_reports_membership_and_levels() {
    let out = run(&["check", "16", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("member: true"));
    assert!(text.contains("C_3: valuation 6 vs 3  ok"));
    assert!(text.contains("k-theory: 16x + 20x^2 + 8x^3, integral, parity ok, in FG"));
}

#[test]
fn check_json_names_first_failure() {
    let out = run(&["check", "16", "--n", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member"], false);
    assert_eq!(v["evidence"]["failure"]["p"], 2);
    assert_eq!(v["evidence"]["failure"]["m"], 4);
}

#[test]
fn check_accepts_negative_and_local_modes() {
    let out = run(&["check", "-7", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("member: true"));

    let out = run(&["check", "17", "--n", "2", "--p", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member"], true);
    assert_eq!(v["evidence"]["closed_form"], true);
}

#[test]
fn non_local_rational_is_a_usage_error() {
    let out = run(&["check", "1/4", "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not in Z_(2)"));
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(run(&["check", "abc", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["check", "1/0", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["residues", "--n", "3", "--modulus", "24"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn phi_csv_lists_coefficients() {
    let out = run(&["phi", "2", "--n", "2", "--format", "csv"]);
    assert_eq!(stdout(&out), "k,n,j,coefficient\n2,2,1,2\n2,2,2,1/6\n");
}

#[test]
fn residues_default_modulus_for_level_one() {
    let out = run(&["residues", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("[0] mod 1"));
}

#[test]
fn table_csv_header_and_rows() {
    let out = run(&["table", "--pmax", "3", "--nmax", "2", "--format", "csv"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,n,e,f,status");
    assert_eq!(lines[2], "2,2,3,3,PROVEN_N_LE_5");
    assert_eq!(lines.len(), 5);
}

#[test]
fn out_flag_writes_file() {
    let path: PathBuf = std::env::temp_dir().join(format!("hpn-table-{}.json", std::process::id()));
    let out = run(&[
        "table",
        "--pmax",
        "5",
        "--nmax",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let rows: Vec<serde_json::Value> = serde_json::from_str(&written).unwrap();
    assert_eq!(rows.len(), 9);
}

#[test]
fn output_is_independent_of_thread_count() {
    let one = run(&["--jobs", "1", "residues", "--n", "3", "--format", "csv"]);
    let four = run(&["--jobs", "4", "residues", "--n", "3", "--format", "csv"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_exit_codes_follow_outcome() {
    let ok = run(&["verify", "--suite", "exponent"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("PASS"));

    let gaps = run(&["verify", "--suite", "bounds", "--format", "json"]);
    assert_eq!(gaps.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&gaps.stdout).unwrap();
    assert_eq!(v[0]["failures"].as_array().unwrap().len(), 5);
}
