use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Sample;
use crate::error::{Error, Result};

pub const DEFAULT_TRAIN_RATIO: f64 = 0.75;

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub seed: u64,
    pub ratio: f64,
    /// Positions of the train and test samples in the input slice.
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

/// Seeded shuffle, then the first `round(ratio · n)` samples train.
pub fn split(samples: &[Sample], ratio: f64, seed: u64) -> Result<DatasetSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Input(format!("split ratio {ratio} outside (0, 1)")));
    }
    if samples.len() < 2 {
        return Err(Error::Input(format!(
            "need at least 2 samples to split, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let n_train = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train_idx, test_idx) = order.split_at(n_train);
    Ok(DatasetSplit {
        train: train_idx.iter().map(|&i| samples[i].clone()).collect(),
        test: test_idx.iter().map(|&i| samples[i].clone()).collect(),
        seed,
        ratio,
        train_indices: train_idx.to_vec(),
        test_indices: test_idx.to_vec(),
    })
}
