use std::fmt::Write as _;
use std::time::Instant;

use qmllab::data::{prepare_digits, split, two_blob_toy, DatasetSplit, Sample};
use qmllab::models::{build_model, ModelKind, ModelSpec};
use qmllab::search::{evolve, Candidate, GeneratorChoice};
use qmllab::training::{train, TrainConfig, TrainReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{percent, write_atomic};

/// Row order of the comparison table.
pub const COMPARE_KINDS: [ModelKind; 4] = [
    ModelKind::BaselineQnn,
    ModelKind::Qmlp,
    ModelKind::Qff,
    ModelKind::Qbp,
];

/// Published accuracies (%) shown under the comparison table for reference.
pub const REFERENCE_ACCURACY: [(ModelKind, f64); 4] = [
    (ModelKind::BaselineQnn, 15.55),
    (ModelKind::Qmlp, 9.40),
    (ModelKind::Qff, 15.17),
    (ModelKind::Qbp, 12.37),
];

pub const DEFAULT_GRADCHECK_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_GRADCHECK_EPSILON: f64 = 1e-5;

fn load_split(config: &RunConfig) -> Result<DatasetSplit, CliError> {
    let samples = prepare_digits(config.data_path()?)?;
    Ok(split(&samples, config.train_ratio, config.seed)?)
}

fn file_stem(kind: ModelKind) -> String {
    kind.name().to_ascii_lowercase()
}

fn display_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::BaselineQnn => "Baseline QNN",
        ModelKind::Qmlp => "QMLP",
        ModelKind::Qff => "QFF",
        ModelKind::Qbp => "QBP",
        ModelKind::ClassicalMlp => "Classical MLP",
        ModelKind::ClassicalFf => "Classical FF",
    }
}

#[derive(Serialize)]
struct TrainDocument<'a> {
    spec: &'a ModelSpec,
    train: &'a TrainConfig,
    train_ratio: f64,
    report: &'a TrainReport,
}

/// Tab-separated `epoch, loss, test_accuracy` rows.
pub fn loss_table(report: &TrainReport) -> String {
    let mut out = String::from("epoch\tloss\ttest_accuracy\n");
    for (i, (loss, acc)) in report
        .epoch_losses
        .iter()
        .zip(&report.epoch_test_accuracy)
        .enumerate()
    {
        writeln!(out, "{}\t{loss}\t{acc}", i + 1).unwrap();
    }
    out
}

pub fn cmd_train(config: &RunConfig) -> Result<(), CliError> {
    let data = load_split(config)?;
    let mut model = build_model(&config.model)?;
    let report = train(&mut model, &data, &config.train).map_err(CliError::runtime)?;

    let stem = file_stem(config.model.kind);
    let doc = TrainDocument {
        spec: &config.model,
        train: &config.train,
        train_ratio: config.train_ratio,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(CliError::runtime)? + "\n";
    let report_path = write_atomic(&config.out, &format!("{stem}_report.json"), &json)?;
    let table_path = write_atomic(&config.out, &format!("{stem}_loss.tsv"), &loss_table(&report))?;

    println!(
        "{}: train {}%  test {}%  ({} epochs, {:.1}s)",
        display_name(config.model.kind),
        percent(report.train_accuracy),
        percent(report.test_accuracy),
        report.epoch_losses.len(),
        report.wall_time_seconds
    );
    println!("report: {}", report_path.display());
    println!("loss series: {}", table_path.display());
    Ok(())
}

/// Accuracy per row, or the error that made it fail.
pub type CompareRow = (ModelKind, Result<f64, String>);

pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = String::from("| Model | Average Accuracy (%) |\n|---|---|\n");
    for (kind, result) in rows {
        let cell = match result {
            Ok(acc) => percent(*acc),
            Err(_) => "FAILED".to_string(),
        };
        writeln!(out, "| {} | {cell} |", display_name(*kind)).unwrap();
    }
    out.push_str("\nPublished reference (not asserted): ");
    let refs: Vec<String> = REFERENCE_ACCURACY
        .iter()
        .map(|(k, v)| format!("{} {v:.2}", display_name(*k)))
        .collect();
    out.push_str(&refs.join(", "));
    out.push('\n');
    out
}

pub fn cmd_compare(config: &RunConfig) -> Result<(), CliError> {
    let data = load_split(config)?;
    let mut rows: Vec<CompareRow> = Vec::new();
    for kind in COMPARE_KINDS {
        let mut spec = ModelSpec::default_for(kind).with_seed(config.model.seed);
        spec.num_qubits = config.model.num_qubits;
        spec.ansatz_depth = config.model.ansatz_depth;
        let start = Instant::now();
        let result = build_model(&spec)
            .and_then(|mut m| train(&mut m, &data, &config.train))
            .map(|r| r.test_accuracy)
            .map_err(|e| e.to_string());
        match &result {
            Ok(acc) => eprintln!(
                "{}: {}% in {:.1}s",
                display_name(kind),
                percent(*acc),
                start.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("{}: FAILED: {e}", display_name(kind)),
        }
        rows.push((kind, result));
    }
    let table = compare_table(&rows);
    let path = write_atomic(&config.out, "compare.md", &table)?;
    print!("{table}");
    println!("table: {}", path.display());
    let failed: Vec<&str> = rows
        .iter()
        .filter(|(_, r)| r.is_err())
        .map(|(k, _)| display_name(*k))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("failed models: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct SearchSummary<'a> {
    best: &'a Candidate,
    best_per_generation: &'a [f64],
    candidates: usize,
    training_runs: usize,
    generator_failures: usize,
    fell_back_to_scripted: bool,
    notes: &'a [String],
}

pub fn cmd_search(config: &RunConfig) -> Result<(), CliError> {
    let data = load_split(config)?;
    let start = Instant::now();
    let (best, archive) = evolve(&config.search, &data).map_err(CliError::runtime)?;

    let archive_path = write_atomic(&config.out, "archive.jsonl", &archive.to_jsonl())?;
    let summary = SearchSummary {
        best: &best,
        best_per_generation: &archive.best_per_generation,
        candidates: archive.len(),
        training_runs: archive.training_runs,
        generator_failures: archive.generator_health.total_failures,
        fell_back_to_scripted: archive.generator_health.fell_back,
        notes: &archive.notes,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(CliError::runtime)? + "\n";
    let summary_path = write_atomic(&config.out, "search_summary.json", &json)?;

    if matches!(config.search.generator, GeneratorChoice::Remote { .. })
        && archive.generator_health.total_failures > 0
    {
        eprintln!(
            "warning: remote generator failed {} time(s){}",
            archive.generator_health.total_failures,
            if archive.generator_health.fell_back {
                "; continued with scripted mutation"
            } else {
                ""
            }
        );
    }
    let trajectory: Vec<String> = archive.best_per_generation.iter().map(|f| percent(*f)).collect();
    println!(
        "best: candidate {} ({} {}q depth {}) at {}%",
        best.id,
        best.spec.kind,
        best.spec.num_qubits,
        best.spec.ansatz_depth,
        percent(best.fitness_or_zero())
    );
    println!("best per generation (%): {}", trajectory.join(" -> "));
    println!(
        "{} candidates, {} training runs, {:.1}s",
        archive.len(),
        archive.training_runs,
        start.elapsed().as_secs_f64()
    );
    println!("archive: {}", archive_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

pub struct GradcheckOptions {
    pub tolerance: f64,
    pub epsilon: f64,
    pub corrupt_shift: Option<f64>,
}

/// A digits sample when data is available, otherwise a synthetic one.
fn probe_sample(config: &RunConfig) -> Result<Sample, CliError> {
    match &config.data {
        Some(path) => {
            let samples = prepare_digits(path)?;
            samples
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Config(format!("{}: no rows", path.display())))
        }
        None => Ok(two_blob_toy(2, config.seed).swap_remove(0)),
    }
}

pub fn cmd_gradcheck(config: &RunConfig, opts: &GradcheckOptions) -> Result<(), CliError> {
    let sample = probe_sample(config)?;
    let mut model = build_model(&config.model)?;
    if let Some(shift) = opts.corrupt_shift {
        model.set_shift(shift);
    }
    let check = model
        .gradient_check(&sample.features, sample.label, opts.epsilon)
        .map_err(CliError::runtime)?;
    let cmp = check.comparison();
    println!("model: {}", config.model.kind);
    println!("parameters: {}", cmp.count);
    println!("max abs deviation: {:.3e}", cmp.max_abs);
    println!("max rel deviation: {:.3e}", cmp.max_rel);
    let worst = cmp.worst_index.map_or("-".to_string(), |i| i.to_string());
    println!("worst parameter index: {worst}");
    if cmp.max_abs < opts.tolerance {
        println!("PASS (tolerance {:.0e})", opts.tolerance);
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "gradient check failed: max abs deviation {:.3e} >= {:.0e} at parameter {worst}",
            cmp.max_abs, opts.tolerance
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_fixed_rows_and_failed_marker() {
        let rows: Vec<CompareRow> = vec![
            (ModelKind::BaselineQnn, Ok(0.5)),
            (ModelKind::Qmlp, Err("boom".into())),
            (ModelKind::Qff, Ok(0.123456)),
            (ModelKind::Qbp, Ok(0.0)),
        ];
        let t = compare_table(&rows);
        let data: Vec<&str> = t.lines().skip(2).take(4).collect();
        assert_eq!(
            data,
            vec![
                "| Baseline QNN | 50.00 |",
                "| QMLP | FAILED |",
                "| QFF | 12.35 |",
                "| QBP | 0.00 |"
            ]
        );
        assert!(t.contains("Baseline QNN 15.55, QMLP 9.40, QFF 15.17, QBP 12.37"));
    }

    #[test]
    fn loss_table_rows() {
        let r = TrainReport {
            epoch_losses: vec![2.0, 1.5],
            epoch_test_accuracy: vec![0.1, 0.2],
            train_accuracy: 0.0,
            test_accuracy: 0.2,
            wall_time_seconds: 0.0,
        };
        assert_eq!(loss_table(&r), "epoch\tloss\ttest_accuracy\n1\t2\t0.1\n2\t1.5\t0.2\n");
    }
}
