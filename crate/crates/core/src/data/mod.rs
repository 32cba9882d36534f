//! Digits ingestion and preprocessing: 8×8 images in `[0, 16]` are pooled
//! to 4×4 and mapped to rotation angles in `[0, π]`.

mod digits;
mod overlay;
mod split;

pub use digits::{load_digits, normalize_to_angles, pool_features, prepare_digits};
pub use overlay::{make_negative, overlay_label, LABEL_SLOTS};
pub use split::{split, DatasetSplit, DEFAULT_TRAIN_RATIO};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub const NUM_CLASSES: usize = 10;
pub const RAW_FEATURES: usize = 64;
pub const POOLED_FEATURES: usize = 16;

/// Processing stage of a sample's features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureStage {
    /// 64 pixel intensities in `[0, 16]`.
    Raw,
    /// 16 pooled intensities in `[0, 16]`.
    Pooled,
    /// Rotation angles in `[0, π]`.
    Angles,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: usize,
    pub stage: FeatureStage,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: usize, stage: FeatureStage) -> Result<Self> {
        if label >= NUM_CLASSES {
            return Err(Error::Validation(format!("label {label} outside 0..=9")));
        }
        let (len, hi) = match stage {
            FeatureStage::Raw => (Some(RAW_FEATURES), 16.0),
            FeatureStage::Pooled => (Some(POOLED_FEATURES), 16.0),
            FeatureStage::Angles => (None, std::f64::consts::PI),
        };
        if let Some(len) = len {
            if features.len() != len {
                return Err(Error::Shape(format!(
                    "{stage:?} sample needs {len} features, got {}",
                    features.len()
                )));
            }
        }
        if let Some(v) = features.iter().find(|v| !(0.0..=hi).contains(*v)) {
            return Err(Error::Validation(format!(
                "{stage:?} feature {v} outside [0, {hi}]"
            )));
        }
        Ok(Sample {
            features,
            label,
            stage,
        })
    }

    pub fn pooled(&self) -> Result<Sample> {
        self.expect_stage(FeatureStage::Raw)?;
        Sample::new(pool_features(&self.features)?, self.label, FeatureStage::Pooled)
    }

    /// Only pooled samples may be normalized; angles are never rescaled twice.
    pub fn to_angles(&self) -> Result<Sample> {
        self.expect_stage(FeatureStage::Pooled)?;
        Sample::new(
            normalize_to_angles(&self.features)?,
            self.label,
            FeatureStage::Angles,
        )
    }

    fn expect_stage(&self, want: FeatureStage) -> Result<()> {
        if self.stage != want {
            return Err(Error::Validation(format!(
                "expected a {want:?} sample, got {:?}",
                self.stage
            )));
        }
        Ok(())
    }
}

/// Two Gaussian blobs (labels 0 and 1, `n/2` each) in angle space.
///
/// Slots `0..10` are zero so label overlays do not collide with the signal;
/// the blobs live in slots `10..16`, centred at `π/4` and `3π/4`.
pub fn two_blob_toy(n: usize, seed: u64) -> Vec<Sample> {
    use std::f64::consts::PI;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.2).expect("valid sigma");
    (0..n)
        .map(|i| {
            let label = i % 2;
            let centre = if label == 0 { PI / 4.0 } else { 3.0 * PI / 4.0 };
            let mut features = vec![0.0; POOLED_FEATURES];
            for f in &mut features[LABEL_SLOTS..] {
                *f = (centre + noise.sample(&mut rng)).clamp(0.0, PI);
            }
            Sample {
                features,
                label,
                stage: FeatureStage::Angles,
            }
        })
        .collect()
}
