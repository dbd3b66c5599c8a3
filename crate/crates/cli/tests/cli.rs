use std::fs;
use std::process::{Command, Output};

fn ordbij(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordbij"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("ordbij runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn verify_bijection_prints_the_pairing() {
    let out = ordbij(&["verify-bijection", "S3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("S3 -> C6: bijection found"));
    assert_eq!(text.lines().filter(|l| l.contains("->")).count(), 7);
}

#[test]
fn psi_prints_exact_values() {
    let out = ordbij(&["psi", "C6", "--k", "1"]);
    assert_eq!((out.status.code(), stdout(&out).as_str()), (Some(0), "21\n"));
    let out = ordbij(&["psi", "S3", "--k", "2", "--compare"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("k=1: S3=13 C6=21 (increasing) holds"));
    let out = ordbij(&["psi", "S3", "--k", "1", "--weight", "reciprocal"]);
    assert_eq!(stdout(&out), "19/6\n");
}

#[test]
fn sweep_of_order_one_is_the_trivial_group() {
    let out = ordbij(&["sweep", "--max-order", "1", "--property", "bij"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("C1"));
    assert!(text.contains("verified 1, refuted 0, skipped 0"));
}

#[test]
fn errors_exit_with_two() {
    let out = ordbij(&["verify-bijection", "NoSuchGroup"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown group: NoSuchGroup"));
    let out = ordbij(&["sweep", "--max-order", "4", "--property", "bij,nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ordbij(&["chain", "S3", "--bases", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ordbij(&["psi", "S3", "--compare", "--weight", "constant.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.csv");
    fs::write(&table, "0,1\n1,x\n").unwrap();
    let out = ordbij(&["show", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("bad.csv:2"), "{err}");

    let weights = dir.path().join("w.csv");
    fs::write(&weights, "1,1,1\n2,2,1\n3,three,1\n").unwrap();
    let out = ordbij(&["psi", "S3", "--weight", weights.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("w.csv:3"), "{}", stderr(&out));
}

#[test]
fn group_files_and_catalog_entries() {
    let dir = tempfile::tempdir().unwrap();
    // C3 as a Cayley table
    fs::write(dir.path().join("c3.csv"), "0,1,2\n1,2,0\n2,0,1\n").unwrap();
    // not associative: 1*1 = 0 but 1*2 = 1
    fs::write(dir.path().join("broken.csv"), "0,1,2\n1,0,1\n2,2,0\n").unwrap();
    let catalog = dir.path().join("catalog.json");
    fs::write(
        &catalog,
        r#"[
            {"name": "T3", "constructor": {"kind": "file", "path": "c3.csv"}, "order": 3},
            {"name": "P6", "constructor": {"kind": "permutations", "degree": 3,
              "generators": [[2, 3, 1], [2, 1, 3]]}, "order": 6}
        ]"#,
    )
    .unwrap();
    let cat = catalog.to_str().unwrap();
    let out = ordbij(&["--catalog", cat, "show", "T3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("T3 (order 3, exponent 3)"));
    let out = ordbij(&["--catalog", cat, "classify", "P6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Min: true"));

    let out = ordbij(&["--catalog", cat, "sweep", "--max-order", "6", "--min-order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("T3") && stdout(&out).contains("P6"));

    let out = ordbij(&["show", dir.path().join("broken.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_append() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.jsonl");
    let r = report.to_str().unwrap();
    assert_eq!(ordbij(&["--report", r, "verify-bijection", "S3"]).status.code(), Some(0));
    let first = fs::read_to_string(&report).unwrap();
    assert_eq!(first.lines().count(), 1);
    assert_eq!(ordbij(&["--report", r, "classify", "A4"]).status.code(), Some(0));
    let both = fs::read_to_string(&report).unwrap();
    assert!(both.starts_with(&first));
    assert_eq!(both.lines().count(), 4);
    for line in both.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["outcome"], "verified");
    }

    let missing = dir.path().join("no").join("r.jsonl");
    let out = ordbij(&["--report", missing.to_str().unwrap(), "verify-bijection", "S3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("report store"));
}

#[test]
fn sweep_reports_skipped_cap() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.jsonl");
    let out = ordbij(&[
        "--cap", "100", "--report", report.to_str().unwrap(),
        "sweep", "--min-order", "120", "--max-order", "120", "--property", "bij",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.contains("\"outcome\":\"skipped-cap\"")));
}

#[test]
fn other_commands() {
    let out = ordbij(&["newton-check", "S4", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().filter(|l| l.ends_with("equal")).count(), 4);

    let out = ordbij(&["chain", "C12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("A(12) = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]"));

    let out = ordbij(&["--json", "topology", "C6", "--opens"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["open_count"], 6);
    assert_eq!(v["separation"]["hausdorff"], false);

    let out = ordbij(&["--json", "show", "A5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["predicates"]["is_simple"], true);
    assert_eq!(v["conjugacy_classes"], 5);

    let out = ordbij(&["--seed", "9", "verify-bijection", "S3xC2"]);
    assert_eq!(out.status.code(), Some(0));
}
