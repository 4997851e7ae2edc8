use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pavcore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pavcore"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_core_two_blocs() {
    let file = data("two_blocs.json");
    let out = pavcore(&["verify-core", path(&file), "--committee", "1,2,5,6,7,8,9,10", "--quota", "hare"]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    assert!(stdout(&out).contains("T = {c1,c2,c3,c4}"), "{}", stdout(&out));
    assert!(stdout(&out).contains("support 1/2"));

    let out = pavcore(&["verify-core", path(&file), "--committee", "1,2,3,5,6,7,8,9", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["stable"], true);
}

#[test]
fn verify_core_droop_blocs_droop() {
    let file = data("droop_blocs.json");
    let args = ["verify-core", path(&file), "--committee", "1,2,5,6,7,8", "--quota", "droop", "--json"];
    let out = pavcore(&args);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["deviation"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["support"], "7/12");
    assert_eq!(v["threshold"], "4/7");
    let out = pavcore(&["verify-core", path(&file), "--committee", "1,2,5,6,7,8", "--quota", "hare"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&pavcore(&["verify-core", path(&bad), "--committee", "1"])), 2);
    let file = data("two_blocs.json");
    assert_eq!(code(&pavcore(&["verify-core", path(&file), "--committee", "1,2"])), 2);
    assert_eq!(code(&pavcore(&["verify-core", path(&file), "--committee", "1,2,3,4,5,6,7,11"])), 2);
    assert_eq!(code(&pavcore(&["prove", "--mode", "histories", "--k", "3"])), 2);
    assert_eq!(code(&pavcore(&["frobnicate"])), 2);
    assert_eq!(code(&pavcore(&["check-certificates", path(&dir.path().join("missing"))])), 2);
}

#[test]
fn prove_inequality() {
    let out = pavcore(&["prove", "--mode", "inequality", "--k", "7"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 violations"));
    let out = pavcore(&["prove", "--mode", "inequality", "--k", "8", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let violations = v["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    for violation in violations {
        assert_eq!(violation["shape"], serde_json::json!({ "size": 4, "overlap": 2 }));
    }
}

fn certificate_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".cert.json"))
        .collect();
    files.sort();
    files
}

/// Adds one to the first nonzero multiplier.
fn tamper(file: &Path) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    let multipliers = v["multipliers"].as_array_mut().unwrap();
    let slot = multipliers.iter_mut().find(|m| m.as_str() != Some("0")).unwrap();
    let bumped: i128 = slot.as_str().unwrap().parse::<i128>().unwrap() + 1;
    *slot = Value::String(bumped.to_string());
    std::fs::write(file, serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn program3_bundle_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let out = pavcore(&["prove", "--mode", "program3", "--k", "5", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let files = certificate_files(dir.path());
    assert_eq!(files.len(), 15);
    let out = pavcore(&["check-certificates", path(dir.path()), "--json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(json(&out)["certificates"], 15);

    tamper(&files[3]);
    let out = pavcore(&["check-certificates", path(dir.path())]);
    assert_eq!(code(&out), 1);
    let name = files[3].file_name().unwrap().to_string_lossy().into_owned();
    assert!(stdout(&out).contains(&format!("FAIL  {name}")), "{}", stdout(&out));
    assert!(stdout(&out).contains("14 passed, 1 failed"));
}

#[test]
fn history_bundle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = pavcore(&["prove", "--mode", "histories", "--m", "10", "--k", "8", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("2 histories"));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["deviations_within_k"], true);
    let histories = summary["histories"].as_array().unwrap();
    assert_eq!(histories.len(), 2);
    assert_eq!(histories[1]["steps"][0]["T"], serde_json::json!([1, 2, 9, 10]));
    assert!(histories[1]["witness"]["ballots"].as_array().is_some());
    let n = certificate_files(dir.path()).len();
    assert_eq!(summary["certificates"], n);
    let out = pavcore(&["check-certificates", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let broken = dir.path().join("broken.cert.json");
    std::fs::write(&broken, r#"{"m": 3, "k": 2}"#).unwrap();
    let out = pavcore(&["check-certificates", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL  broken.cert.json"));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = pavcore(&["prove", "--mode", "histories", "--m", "12", "--k", "9", "--budget-seconds", "0"]);
    assert_eq!(code(&out), 3, "{}", stdout(&out));
    assert!(stdout(&out).contains("partial"));
}

#[test]
fn empty_bundle_passes_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = pavcore(&["check-certificates", path(dir.path())]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("warning: no certificates"));
}

#[test]
fn rule_recursive_pav_two_blocs() {
    let file = data("two_blocs.json");
    let args = [
        "rule",
        path(&file),
        "--rule",
        "recursive-pav",
        "--quota",
        "hare",
        "--start",
        "1,2,5,6,7,8,9,10",
        "--json",
    ];
    let out = pavcore(&args);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["status"], "success");
    let committee: Vec<u64> = v["committee"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert!([1, 2, 3, 4].iter().all(|c| committee.contains(c)), "{committee:?}");
    assert_eq!(v["trace"][0]["T"], serde_json::json!([1, 2, 3, 4]));
    let committee: Vec<String> = committee.iter().map(|c| c.to_string()).collect();
    let out = pavcore(&["verify-core", path(&file), "--committee", &committee.join(",")]);
    assert_eq!(code(&out), 0);

    // The greedy start already lands on a core-stable committee.
    let out = pavcore(&["rule", path(&file), "--rule", "recursive-pav", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["trace"], serde_json::json!([]));
}

#[test]
fn rule_global_pav_k9() {
    let out = pavcore(&["rule", path(&data("k9.json")), "--rule", "pav-global", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let committees = v["committees"].as_array().unwrap();
    assert_eq!(committees.len(), 1);
    assert_eq!(committees[0]["committee"], serde_json::json!([1, 2, 5, 6, 7, 8, 9, 10, 11]));
    assert!(committees[0]["score"].as_str().unwrap().contains('/'));
}

#[test]
fn rule_local_pav_single_ballot() {
    let out = pavcore(&["rule", path(&data("single.json")), "--rule", "pav-local", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["committee"], serde_json::json!([2, 3, 5]));
}

#[test]
fn program3_k7_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = pavcore(&["prove", "--mode", "program3", "--k", "7", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = pavcore(&["check-certificates", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(certificate_files(dir.path()).len(), 28);
}
