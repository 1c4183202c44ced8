use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn toy() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy.csv")
}

fn qsvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsvm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const FAST: [&str; 6] = ["--qubits", "2", "--sa-sweeps", "200", "--sa-restarts", "2"];

fn train_into(dir: &Path, extra: &[&str]) -> (PathBuf, PathBuf) {
    let model = dir.join("model.json");
    let report = dir.join("report.json");
    let data = toy();
    let mut args = vec![
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
        "--no-timestamp",
    ];
    args.extend_from_slice(&FAST);
    args.extend_from_slice(extra);
    let out = qsvm(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    (model, report)
}

#[test]
fn train_writes_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (model, report) = train_into(dir.path(), &[]);
    assert!(model.is_file());
    let r = json_file(&report);
    assert_eq!(r["solver_energy"], r["energy_recomputed"]);
    assert_eq!(r["qubo_vars"], 30 * 6);
    assert!(r["kta"].as_f64().unwrap() > 0.0);
    assert!(r.get("timings").is_none());
    assert!(r.get("generated_unix").is_none());
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ma, ra) = train_into(a.path(), &[]);
    let (mb, rb) = train_into(b.path(), &[]);
    assert_eq!(std::fs::read(ra).unwrap(), std::fs::read(rb).unwrap());
    assert_eq!(std::fs::read(ma).unwrap(), std::fs::read(mb).unwrap());
}

#[test]
fn export_qubo_flag_writes_importable_file() {
    let dir = tempfile::tempdir().unwrap();
    let qubo = dir.path().join("train.qubo");
    train_into(dir.path(), &["--c-value", "7", "--export-qubo", qubo.to_str().unwrap()]);
    let problem = qsvm::anneal::import_qubo(&qubo).unwrap();
    assert_eq!(problem.num_vars(), 30 * 3);
    let text = std::fs::read_to_string(&qubo).unwrap();
    assert!(text.starts_with('#'));
    assert!(text.contains("# C 7"));
}

#[test]
fn export_qubo_command_matches_train_flag() {
    let dir = tempfile::tempdir().unwrap();
    let from_train = dir.path().join("a.qubo");
    let standalone = dir.path().join("b.qubo");
    train_into(dir.path(), &["--export-qubo", from_train.to_str().unwrap()]);
    let data = toy();
    let mut args = vec![
        "export-qubo",
        "--data",
        data.to_str().unwrap(),
        "--output",
        standalone.to_str().unwrap(),
    ];
    args.extend_from_slice(&FAST);
    let out = qsvm(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(from_train).unwrap(),
        std::fs::read(standalone).unwrap()
    );
}

#[test]
fn evaluate_on_training_split() {
    let dir = tempfile::tempdir().unwrap();
    let (model, _) = train_into(dir.path(), &[]);
    let data = toy();
    let out = qsvm(&[
        "evaluate",
        "--model",
        model.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--split",
        "train",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let m: Value = serde_json::from_slice(&out.stdout).unwrap();
    let c = &m["confusion"];
    let total: u64 = ["true_positive", "false_positive", "false_negative", "true_negative"]
        .iter()
        .map(|k| c[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 30);
    for key in ["positive", "negative"] {
        for field in ["precision", "recall", "f1"] {
            assert!(m[key][field].is_number());
        }
    }
    assert!(m["macro_f1"].is_number());
}

#[test]
fn predict_labels_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let (model, _) = train_into(dir.path(), &[]);
    let data = toy();
    let out = qsvm(&["predict", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 40);
    for row in rows {
        let f = row["decision_value"].as_f64().unwrap();
        assert_eq!(row["label"].as_i64().unwrap(), if f >= 0.0 { 1 } else { -1 });
    }
}

#[test]
fn version_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (model, _) = train_into(dir.path(), &[]);
    let text = std::fs::read_to_string(&model)
        .unwrap()
        .replacen("\"version\": 1", "\"version\": 9", 1);
    std::fs::write(&model, text).unwrap();
    let data = toy();
    let out = qsvm(&["evaluate", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unsupported model version 9"), "{}", stderr(&out));
}

#[test]
fn missing_data_file_is_a_usage_error() {
    let out = qsvm(&["train", "--data", "/no/such/wdbc.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/no/such/wdbc.csv"));
    let out = qsvm(&["kta", "--data", "/no/such/wdbc.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_is_a_usage_error() {
    let data = toy();
    let data = data.to_str().unwrap();
    for args in [
        vec!["train", "--data", data, "--c-value", "10"],
        vec!["train", "--data", data, "--test-fraction", "1.5"],
        vec!["train", "--data", data, "--qubits", "30"],
        vec!["train", "--data", data, "--feature-map", "xy"],
        vec!["grid", "--data", data, "--c-value", "5"],
    ] {
        let out = qsvm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn kta_ranking_is_sorted() {
    let data = toy();
    let out = qsvm(&[
        "kta",
        "--data",
        data.to_str().unwrap(),
        "--qubits",
        "4",
        "--feature-map",
        "z,su2rr",
        "--reps",
        "1,2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let scores: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["kta"].as_f64().unwrap())
        .collect();
    assert_eq!(scores.len(), 4);
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn grid_rows_follow_sort_contract() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let data = toy();
    let out = qsvm(&[
        "grid",
        "--data",
        data.to_str().unwrap(),
        "--qubits",
        "2",
        "--feature-map",
        "z,zz",
        "--reps",
        "1",
        "--c-value",
        "1,3",
        "--sa-sweeps",
        "200",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let keys: Vec<(f64, usize)> = rows
        .iter()
        .map(|r| (r[6].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    assert!(keys
        .windows(2)
        .all(|w| w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 <= w[1].1)));
}

#[test]
fn grid_marks_oversized_cells_skipped() {
    let data = toy();
    let out = qsvm(&[
        "grid",
        "--data",
        data.to_str().unwrap(),
        "--qubits",
        "2,25",
        "--reps",
        "1",
        "--c-value",
        "1",
        "--sa-sweeps",
        "100",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["status"], "ok");
    assert_eq!(rows[1]["status"], "skipped: resource");
}
