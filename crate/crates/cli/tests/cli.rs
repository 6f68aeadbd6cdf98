//! End-to-end checks of the command-line surface: flag handling, output
//! formats, exit codes and byte-level reproducibility.

use std::process::{Command, Output};

fn nqss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nqss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn two_partner_emits_fixed_csv_header_and_rows() {
    let out = nqss(&["two-partner", "--points", "11"]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "phi,I_AB,I_AE,I_BE,S_AB,S_AE,S_BE,secure,delta_I_AB,delta_I_AE,delta_I_BE,delta_S_AB,delta_S_AE,delta_S_BE"
    );
    assert_eq!(lines.count(), 11);

    // First row is phi = 0: full information, S_AB = 2 sqrt 2, S_AE = 0.
    let first = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = first.split(',').collect();
    assert_eq!(cells[1], "1.00000000e0");
    assert_eq!(cells[4], "2.82842712e0");
    assert_eq!(cells[5], "0.00000000e0");
    assert_eq!(cells[7], "true");
}

#[test]
fn two_partner_runs_are_byte_identical() {
    let a = nqss(&["two-partner", "--points", "31"]);
    let b = nqss(&["two-partner", "--points", "31"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scenario_json_rows_carry_the_documented_schema() {
    let out = nqss(&[
        "scenario", "--N", "3", "--n", "1", "--points", "3", "--restarts", "24", "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid json");
    let rows = rows.as_array().expect("array of rows");
    assert_eq!(rows.len(), 3);
    let expected_keys = [
        "N", "n", "phi", "I_a", "I_u", "S_a", "S_a_formula", "S_u", "S_u_formula", "secure",
        "exact_formula",
    ];
    for row in rows {
        let obj = row.as_object().expect("row object");
        assert_eq!(obj.len(), expected_keys.len());
        for key in expected_keys {
            assert!(obj.contains_key(key), "missing key {key}");
        }
    }
    // phi = 0 row: I_a = 1, I_u = 0, secure.
    assert_eq!(rows[0]["I_a"], 1.0);
    assert_eq!(rows[0]["I_u"], 0.0);
    assert_eq!(rows[0]["secure"], true);
}

#[test]
fn scenario_security_flag_flips_across_the_crossing() {
    // 5 points on [0, pi/2]: two below pi/4, the boundary, two above.
    let out = nqss(&["scenario", "--N", "3", "--n", "2", "--points", "5", "--restarts", "24"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let secure: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(9).unwrap())
        .collect();
    assert_eq!(secure, ["true", "true", "false", "false", "false"]);
}

#[test]
fn overlap_table_filters_cases_and_reports_verdicts() {
    let out = nqss(&["overlap-table", "--case", "1", "--case", "5", "--restarts", "24"]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let text = stdout_of(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1,") && rows[0].ends_with("impossible,impossible"));
    assert!(rows[1].starts_with("5,") && rows[1].ends_with("possible,possible"));
}

#[test]
fn overlap_table_rejects_unknown_case_indices() {
    let out = nqss(&["overlap-table", "--case", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_reports_the_double_violation() {
    let out = nqss(&["counterexample", "--restarts", "24"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let row = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[0], "9.55000000e-1");
    let s1: f64 = cells[1].parse().unwrap();
    let s2: f64 = cells[2].parse().unwrap();
    assert!((s1 - s2).abs() < 1e-6);
    assert!(s1 > 2.0 * std::f64::consts::SQRT_2);
    assert_eq!(cells[3], "true");
}

#[test]
fn scenario_runs_are_byte_identical_for_equal_seeds() {
    let args = [
        "scenario", "--N", "3", "--n", "1", "--points", "4", "--restarts", "8", "--seed", "5",
    ];
    let a = nqss(&args);
    let b = nqss(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scenario_runs_at_the_documented_size_cap() {
    // N = 6 is the largest register the numerical path accepts
    // (7 qubits with the probe).
    let out = nqss(&[
        "scenario", "--N", "6", "--n", "3", "--points", "2", "--restarts", "12",
    ]);
    assert!(out.status.success(), "stderr: {:?}", out.stderr);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 3);
    let first = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = first.split(',').collect();
    // phi = 0: S_a reaches the 6-qubit ceiling 2^(7/2).
    let s_a: f64 = cells[5].parse().unwrap();
    assert!((s_a - 2f64.powf(3.5)).abs() < 1e-3, "S_a = {s_a}");
}

#[test]
fn bad_grids_exit_with_usage_errors() {
    assert_eq!(nqss(&["two-partner", "--points", "1"]).status.code(), Some(2));
    assert_eq!(
        nqss(&["scenario", "--N", "3", "--n", "5", "--points", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nqss(&["scenario", "--N", "9", "--n", "1", "--points", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join("nqss-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curves.csv");
    let to_file = nqss(&["two-partner", "--points", "9", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    let from_file = std::fs::read(&path).unwrap();
    let to_stdout = nqss(&["two-partner", "--points", "9"]);
    assert_eq!(from_file, to_stdout.stdout);
    std::fs::remove_file(&path).ok();
}
