use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn gapn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn field_info() {
    let out = gapn(&["field-info", "-p", "7", "-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["q"], 49);
    assert_eq!(v["subgroup_p_minus_1_size"], 8);

    assert_eq!(stdout_json(&gapn(&["field-info", "-p", "3", "-n", "1"]))["q"], 3);

    let out = gapn(&["field-info", "-p", "4", "-n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn verify_exit_codes() {
    let gold = write_temp(r#"{"field": {"p": 5, "n": 2}, "terms": [{"exp": 9, "coeff": [1]}]}"#);
    let out = gapn(&["verify", gold.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["is_gapn"], true);

    let square = write_temp(r#"{"field": {"p": 3, "n": 2}, "terms": [{"exp": 2, "coeff": [1]}]}"#);
    let out = gapn(&["verify", square.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["is_gapn"], false);
    assert!(v["witness"]["a"].is_array());

    let bad = write_temp("{\"field\": ");
    assert_eq!(gapn(&["verify", bad.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(gapn(&["verify", "/nonexistent/f.json"]).status.code(), Some(2));
}

#[test]
fn construct_families() {
    let out = gapn(&["construct", "--family", "even-binomial", "-p", "13", "--h", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["recipe"]["degree"], 24);
    assert_eq!(v["recipe"]["family"], "even-binomial");
    assert_eq!(v["recipe"]["params"]["N"], 7);
    assert_eq!(v["verdict"]["is_gapn"], true);
    assert_eq!(v["function"]["terms"].as_array().unwrap().len(), 2);

    let out = gapn(&["construct", "--family", "trinomial", "-p", "7", "--h", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["recipe"]["degree"], 8);
    assert_eq!(v["verdict"]["is_gapn"], true);

    let out = gapn(&["construct", "--family", "odd-binomial", "-p", "7", "--k", "6", "--l", "5"]);
    assert_eq!(stdout_json(&out)["recipe"]["degree"], 11);

    let out = gapn(&["construct", "--family", "even-binomial", "-p", "7", "--h", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Mersenne prime"));

    let out = gapn(&["construct", "--family", "mod3-binomial", "-p", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_binomial_degrees() {
    let out = gapn(&["search", "-p", "7", "--shape", "binomial", "--degree", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|h| h["degree"] == 10));
    let ords: Vec<u64> = lines.iter().map(|h| h["ordinal"].as_u64().unwrap()).collect();
    assert!(ords.windows(2).all(|w| w[0] < w[1]));

    let out = gapn(&["search", "-p", "7", "--shape", "binomial", "--degree", "8", "--degree", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["hits_by_degree"]["8"], 0);
    assert_eq!(summary["hits_by_degree"]["12"], 0);
}

#[test]
fn search_csv_to_file_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("hits-{threads}.csv"));
        let out = gapn(&[
            "search", "-p", "5", "--shape", "binomial", "--format", "csv",
            "--threads", threads, "-o", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert!(files[0].starts_with("ordinal,degree,worst_fiber,terms\n"));
    assert!(files[0].lines().count() > 1);
}

#[test]
fn search_budget_and_usage_errors() {
    let out = gapn(&["search", "-p", "7", "--shape", "trinomial", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(gapn(&["search", "-p", "7", "--shape", "pentagon"]).status.code(), Some(2));
    assert_eq!(gapn(&["search", "-p", "9", "--shape", "monomial"]).status.code(), Some(2));
}

#[test]
fn table_cap_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_gapn"))
        .args(["field-info", "-p", "7", "-n", "2"])
        .env("GAPN_TABLE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_single_claims() {
    let out = gapn(&["reproduce", "--claim", "power-identity", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], true);
    assert_eq!(gapn(&["reproduce", "--claim", "no-such-claim"]).status.code(), Some(2));
}
