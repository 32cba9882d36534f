use std::path::Path;

use super::{FeatureStage, Sample, NUM_CLASSES, POOLED_FEATURES, RAW_FEATURES};
use crate::error::{Error, Result};

/// Reads the digits CSV: 65 comma-separated integers per row (64 pixels in
/// `0..=16`, then the label), no header. Rows are 1-based in errors.
pub fn load_digits(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut samples = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != RAW_FEATURES + 1 {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", RAW_FEATURES + 1, record.len()),
            });
        }
        let values = record
            .iter()
            .map(|f| f.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                row,
                message: e.to_string(),
            })?;
        let (pixels, label) = values.split_at(RAW_FEATURES);
        if let Some(p) = pixels.iter().find(|p| !(0..=16).contains(*p)) {
            return Err(Error::Validation(format!("row {row}: pixel {p} outside 0..=16")));
        }
        let label = label[0];
        if !(0..NUM_CLASSES as i64).contains(&label) {
            return Err(Error::Validation(format!("row {row}: label {label} outside 0..=9")));
        }
        samples.push(Sample {
            features: pixels.iter().map(|&p| p as f64).collect(),
            label: label as usize,
            stage: FeatureStage::Raw,
        });
    }
    Ok(samples)
}

/// Non-overlapping 2×2 mean pooling of a row-major 8×8 image into 4×4.
pub fn pool_features(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != RAW_FEATURES {
        return Err(Error::Shape(format!(
            "pooling needs {RAW_FEATURES} values, got {}",
            raw.len()
        )));
    }
    let mut out = Vec::with_capacity(POOLED_FEATURES);
    for r in 0..4 {
        for c in 0..4 {
            let at = |dr: usize, dc: usize| raw[(2 * r + dr) * 8 + 2 * c + dc];
            out.push((at(0, 0) + at(0, 1) + at(1, 0) + at(1, 1)) / 4.0);
        }
    }
    Ok(out)
}

/// `x · π/16` for values in `[0, 16]`.
pub fn normalize_to_angles(pooled: &[f64]) -> Result<Vec<f64>> {
    pooled
        .iter()
        .map(|&x| {
            if (0.0..=16.0).contains(&x) {
                Ok(x * std::f64::consts::PI / 16.0)
            } else {
                Err(Error::Validation(format!("pooled value {x} outside [0, 16]")))
            }
        })
        .collect()
}

/// Loads, pools and angle-normalizes the digits file.
pub fn prepare_digits(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    load_digits(path)?
        .iter()
        .map(|s| s.pooled()?.to_angles())
        .collect()
}
