use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SUBSET_ROWS: usize = 200;

fn qmllab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmllab"));
    cmd.env_remove("QMLLAB_DATA");
    cmd
}

/// Temp dir holding the first rows of the digits data.
fn workspace() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let full = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/digits.csv");
    let rows: Vec<String> = fs::read_to_string(full)
        .unwrap()
        .lines()
        .take(SUBSET_ROWS)
        .map(str::to_string)
        .collect();
    let data = dir.path().join("digits.csv");
    fs::write(&data, rows.join("\n") + "\n").unwrap();
    (dir, data)
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    eprintln!("stdout:\n{}", String::from_utf8_lossy(&out.stdout));
    eprintln!("stderr:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn train_once(data: &Path, out: &Path) -> Output {
    run(qmllab()
        .args(["train", "--model", "baseline", "--epochs", "2", "--qubits", "4", "--data"])
        .arg(data)
        .arg("--out")
        .arg(out))
}

#[test]
fn train_writes_report_and_loss_series() {
    let (dir, data) = workspace();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(train_once(&data, &a).status.success());
    assert!(train_once(&data, &b).status.success());

    let report_name = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .find(|n| n.ends_with("_report.json"))
        .expect("report written");
    let report: serde_json::Value = serde_json::from_str(&read(&a.join(&report_name))).unwrap();
    assert_eq!(report["report"]["epoch_losses"].as_array().unwrap().len(), 2);
    assert_eq!(read(&a.join(&report_name)), read(&b.join(&report_name)));

    let loss_name = report_name.replace("_report.json", "_loss.tsv");
    let loss = read(&a.join(&loss_name));
    assert_eq!(loss.lines().count(), 3, "{loss}");
    assert_eq!(loss, read(&b.join(&loss_name)));
}

#[test]
fn missing_data_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nowhere.csv");
    let out = run(qmllab().args(["train", "--data"]).arg(&missing).arg("--out").arg(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.csv"));

    let out = run(qmllab().args(["train", "--out"]).arg(dir.path()));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_values_name_their_key() {
    let (dir, data) = workspace();
    let out = run(qmllab().args(["train", "--epochs", "0", "--data"]).arg(&data).arg("--out").arg(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("train.epochs"));

    let out = run(qmllab().args(["train", "--model", "transformer", "--data"]).arg(&data));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_merges_under_flags() {
    let (dir, data) = workspace();
    let config = dir.path().join("run.toml");
    let out_dir = dir.path().join("from_file");
    fs::write(
        &config,
        format!(
            "[data]\npath = {data:?}\n[output]\ndir = {out_dir:?}\n[model]\nkind = \"baseline\"\nnum_qubits = 4\n[train]\nepochs = 5\n"
        ),
    )
    .unwrap();
    let out = run(qmllab().args(["train", "--epochs", "1", "--config"]).arg(&config));
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("baselineqnn_report.json"))).unwrap();
    assert_eq!(report["train"]["epochs"], 1);
    assert_eq!(report["spec"]["num_qubits"], 4);

    fs::write(&config, "[train]\nepoch = 3\n").unwrap();
    let out = run(qmllab().args(["train", "--config"]).arg(&config).arg("--data").arg(&data));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_prints_four_rows() {
    let (dir, data) = workspace();
    let out = run(qmllab()
        .args(["compare", "--epochs", "1", "--qubits", "4", "--depth", "1", "--data"])
        .arg(&data)
        .arg("--out")
        .arg(dir.path()));
    assert!(out.status.success());
    let table = read(&dir.path().join("compare.md"));
    let rows: Vec<&str> = table
        .lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| Model"))
        .collect();
    assert_eq!(rows.len(), 4, "{table}");
    for name in ["Baseline QNN", "QMLP", "QFF", "QBP"] {
        assert!(rows.iter().any(|r| r.contains(name)), "{name} missing");
    }
    assert!(table.contains("not asserted"));
}

fn search(data: &Path, out: &Path, extra: &[&str]) -> Output {
    run(qmllab()
        .args(["search", "--profile", "ci", "--population", "3", "--generations", "2", "--qubits", "4"])
        .args(extra)
        .arg("--data")
        .arg(data)
        .arg("--out")
        .arg(out))
}

#[test]
fn search_is_bounded_and_reproducible() {
    let (dir, data) = workspace();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(search(&data, &a, &[]).status.success());
    assert!(search(&data, &b, &[]).status.success());
    let archive = read(&a.join("archive.jsonl"));
    assert!(archive.lines().count() <= 3 * 2);
    assert_eq!(archive, read(&b.join("archive.jsonl")));
    let summary: serde_json::Value = serde_json::from_str(&read(&a.join("search_summary.json"))).unwrap();
    assert!(summary.is_object());
}

#[test]
fn unreachable_generator_falls_back() {
    let (dir, data) = workspace();
    let scripted = dir.path().join("scripted");
    let remote = dir.path().join("remote");
    assert!(search(&data, &scripted, &[]).status.success());
    let out = search(
        &data,
        &remote,
        &["--generator", "remote", "--endpoint", "http://127.0.0.1:9/generate"],
    );
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
    assert_eq!(read(&scripted.join("archive.jsonl")), read(&remote.join("archive.jsonl")));

    let out = run(qmllab().args(["search", "--generator", "remote", "--data"]).arg(&data));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gradcheck_passes_and_catches_a_bad_shift() {
    let out = run(qmllab().args(["gradcheck", "--model", "qbp", "--qubits", "4"]));
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = run(qmllab().args(["gradcheck", "--model", "qbp", "--qubits", "4", "--corrupt-shift", "1.0"]));
    assert_eq!(out.status.code(), Some(2));
}
