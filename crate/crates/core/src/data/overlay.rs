use rand::Rng;

use super::{Sample, NUM_CLASSES};
use crate::error::{Error, Result};

/// Feature slots overwritten by the label overlay.
pub const LABEL_SLOTS: usize = NUM_CLASSES;

/// Copy of `features` with slots `0..10` set to `one_hot(class) · π`.
pub fn overlay_label(features: &[f64], class: usize) -> Result<Vec<f64>> {
    if class >= NUM_CLASSES {
        return Err(Error::Input(format!("class {class} outside 0..=9")));
    }
    if features.len() < LABEL_SLOTS {
        return Err(Error::Shape(format!(
            "overlay needs at least {LABEL_SLOTS} features, got {}",
            features.len()
        )));
    }
    let mut out = features.to_vec();
    for (slot, v) in out[..LABEL_SLOTS].iter_mut().enumerate() {
        *v = if slot == class { std::f64::consts::PI } else { 0.0 };
    }
    Ok(out)
}

/// Same image overlaid with a uniformly drawn wrong label; the returned
/// label is that wrong label.
pub fn make_negative<R: Rng + ?Sized>(sample: &Sample, rng: &mut R) -> Result<Sample> {
    let mut wrong = rng.gen_range(0..NUM_CLASSES - 1);
    if wrong >= sample.label {
        wrong += 1;
    }
    Ok(Sample {
        features: overlay_label(&sample.features, wrong)?,
        label: wrong,
        stage: sample.stage,
    })
}
