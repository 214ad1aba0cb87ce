//! End-to-end checks of the command-line interface: flags, exit codes,
//! the JSON schema, and file inputs.

use std::process::{Command, Output};

fn roselect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roselect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verified_generated_run_exits_zero() {
    let out = roselect(&["--gen", "1000:seed=7", "--k", "500", "--alg", "linear-bits", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verify: MATCH"));
}

#[test]
fn json_schema_is_stable() {
    let out = roselect(&[
        "--gen", "512:seed=3,dist=few-distinct",
        "--k", "100",
        "--alg", "auto",
        "--json",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let obj = v.as_object().unwrap();
    let expected = [
        "n",
        "k",
        "algorithm",
        "budget_bits",
        "answer_index",
        "answer_value",
        "comparisons",
        "reads",
        "passes",
        "peak_workspace_bits",
        "elapsed_ms",
        "verified",
    ];
    assert_eq!(obj.len(), expected.len());
    for field in expected {
        assert!(obj.contains_key(field), "missing {field}");
    }
    assert_eq!(obj["n"], 512);
    assert_eq!(obj["verified"], true);
    assert!(obj["budget_bits"].is_null());
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = roselect(&["--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_k_is_a_usage_error() {
    let out = roselect(&["--gen", "10:seed=1", "--k", "11"]);
    assert_eq!(out.status.code(), Some(2));
    let out = roselect(&["--gen", "10:seed=1", "--k", "zero"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tiny_budget_is_a_parameter_error() {
    let out = roselect(&[
        "--alg", "general",
        "--budget-bits", "100",
        "--gen", "1000000:seed=1",
        "--k", "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budgeted_run_stays_within_budget() {
    let out = roselect(&[
        "--gen", "100000:seed=1",
        "--k", "1",
        "--alg", "general",
        "--budget-bits", "4000000",
        "--json",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["answer_value"], 1);
    assert!(v["peak_workspace_bits"].as_u64().unwrap() <= 4_000_000);
}

#[test]
fn all_ranks_verification() {
    let out = roselect(&["--gen", "64:seed=5,dist=few-distinct", "--k", "all", "--alg", "logsq"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("MATCH"));
}

#[test]
fn text_and_binary_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("in.txt");
    std::fs::write(&text, "3\n1\n4\n1\n5\n").unwrap();
    let out = roselect(&[
        "--input",
        text.to_str().unwrap(),
        "--k",
        "2",
        "--alg",
        "baseline",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    // Two 1s; the tie-break picks the earlier position for k=1, so k=2
    // is the later 1 at position 4.
    assert_eq!(v["answer_index"], 4);
    assert_eq!(v["answer_value"], 1);

    let bin = dir.path().join("in.bin");
    let values: Vec<i64> = vec![9, -2, 7];
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(&bin, bytes).unwrap();
    let out = roselect(&[
        "--input-binary",
        bin.to_str().unwrap(),
        "--k",
        "1",
        "--alg",
        "oracle",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["answer_value"], -2);
}

#[test]
fn malformed_text_input_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("bad.txt");
    std::fs::write(&text, "3\noops\n").unwrap();
    let out = roselect(&["--input", text.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn bench_sweep_continues_past_errors() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.txt");
    std::fs::write(
        &sweep,
        "# comment\n4096 0 linear-bits\n4096 100 general\n4096 0 logsq\n",
    )
    .unwrap();
    let out = roselect(&["--bench", sweep.to_str().unwrap(), "--json", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["error"].is_null() || !rows[0].as_object().unwrap().contains_key("error"));
    assert!(rows[1]["error"].is_string(), "row: {}", rows[1]);
    assert!(rows[2]["comparisons"].is_u64());
}

#[test]
fn empty_bench_sweep_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("empty.txt");
    std::fs::write(&sweep, "").unwrap();
    let out = roselect(&["--bench", sweep.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "[]");
}

#[test]
fn identical_config_gives_identical_counters() {
    let args = [
        "--gen", "20000:seed=42",
        "--k", "777",
        "--alg", "general",
        "--budget-bits", "2000000",
        "--json",
        "--verify",
    ];
    let mut reports = Vec::new();
    for _ in 0..3 {
        let out = roselect(&args);
        assert_eq!(out.status.code(), Some(0));
        let mut v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[1], reports[2]);
}
