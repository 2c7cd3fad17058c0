//! End-to-end checks of the binary: exit codes, the determinism
//! contract, and the budget guard.

use std::process::{Command, Output};

fn ffverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffverify"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn exceptional_case_passes_with_exit_zero() {
    let out = ffverify(&["verify", "flanders", "--n", "2", "--q", "2", "--r", "1", "--mode", "affine"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"exceptional\":9"), "unexpected report: {stdout}");
    assert!(stdout.contains("\"pass\":true"));
    assert!(!stdout.contains("wall_ms"), "timings leak into default output");
}

#[test]
fn iso_all_emits_four_passing_certificates() {
    let out = ffverify(&["iso", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    for line in lines {
        assert!(line.contains("\"pass\":true"), "failing certificate: {line}");
    }
}

#[test]
fn budget_refusal_exits_two() {
    let out = ffverify(&["verify", "flanders", "--n", "9", "--q", "5", "--r", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("budget"), "unexpected stderr: {stderr}");
}

#[test]
fn unknown_flag_exits_two() {
    let out = ffverify(&["verify", "flanders", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tightened_env_budget_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_ffverify"))
        .args(["verify", "bound", "--n", "3", "--q", "2", "--r", "2"])
        .env("FFVERIFY_BUDGET", "1000")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format_is_a_summary() {
    let out = ffverify(&["verify", "span-gl", "--n", "2", "--q", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS"), "unexpected text report: {stdout}");
}

#[test]
fn exports_have_expected_counts() {
    for (args, count) in [
        (vec!["export", "glq", "--n", "2", "--q", "3"], "\"count\":48"),
        (vec!["export", "sp4"], "\"count\":720"),
        (vec!["export", "ag2"], "\"count\":720"),
        (vec!["export", "qspace"], "\"count\":16"),
    ] {
        let out = ffverify(&args);
        assert_eq!(out.status.code(), Some(0), "args: {args:?}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains(count), "args {args:?}: missing {count}");
    }
}

#[test]
fn all_is_byte_identical_across_worker_counts() {
    let one = ffverify(&["all", "--workers", "1"]);
    let eight = ffverify(&["all", "--workers", "8"]);
    assert_eq!(one.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(eight.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout, "suite output depends on worker count");
    let rerun = ffverify(&["all", "--workers", "8"]);
    assert_eq!(eight.stdout, rerun.stdout, "suite output differs between runs");
}
