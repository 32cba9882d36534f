//! Losses, optimizers, the epoch loop and accuracy evaluation.

mod loss;
mod optim;

pub use loss::{sigmoid, softmax_cross_entropy, softplus};
pub use optim::{Optimizer, OptimizerKind, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{DatasetSplit, Sample};
use crate::error::{Error, Result};
use crate::models::{Classifier, Model};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    /// Adam, lr 0.01, batch 16, 15 epochs, seed 1.
    fn default() -> Self {
        TrainConfig {
            epochs: 15,
            batch_size: 16,
            learning_rate: 0.01,
            optimizer: OptimizerKind::Adam,
            seed: 1,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::config("train.epochs", "must be at least 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::config("train.batch_size", "must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config(
                "train.learning_rate",
                format!("{} must be finite and positive", self.learning_rate),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean batch loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Test accuracy after each epoch.
    pub epoch_test_accuracy: Vec<f64>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// Not serialized, so reports of identical runs are byte-identical.
    #[serde(skip)]
    pub wall_time_seconds: f64,
}

/// Trains `model` on `split.train` and reports accuracies on both parts.
pub fn train(model: &mut Model, split: &DatasetSplit, config: &TrainConfig) -> Result<TrainReport> {
    config.validate()?;
    if split.train.is_empty() || split.test.is_empty() {
        return Err(Error::Input("train and test sets must be nonempty".into()));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..split.train.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut epoch_test_accuracy = Vec::with_capacity(config.epochs);

    let mut optimizer = match model.as_ff_mut() {
        Some(net) => {
            net.reset_optimizers(config.optimizer);
            None
        }
        None => {
            let n = model.trainable_params().len();
            Some(Optimizer::new(config.optimizer, n))
        }
    };

    for epoch in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        let mut losses = Vec::new();
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &split.train[i]).collect();
            let loss = match (model.as_ff_mut(), optimizer.as_mut()) {
                (Some(net), _) => net.train_batch(&batch, config.learning_rate, &mut rng)?,
                (None, Some(opt)) => {
                    let clf = model
                        .as_classifier_mut()
                        .expect("non-FF models are classifiers");
                    classifier_step(clf, &batch, opt, config.learning_rate)?
                }
                (None, None) => unreachable!("optimizer exists for classifiers"),
            };
            if !loss.is_finite() {
                return Err(Error::Training(format!("non-finite loss in epoch {}", epoch + 1)));
            }
            losses.push(loss);
        }
        epoch_losses.push(losses.iter().sum::<f64>() / losses.len() as f64);
        epoch_test_accuracy.push(evaluate(model, &split.test)?);
    }

    Ok(TrainReport {
        epoch_losses,
        train_accuracy: evaluate(model, &split.train)?,
        test_accuracy: *epoch_test_accuracy.last().expect("epochs >= 1"),
        epoch_test_accuracy,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}

/// One optimizer step on the batch-mean loss. Per-sample gradients are
/// summed in sample order.
fn classifier_step(
    model: &mut dyn Classifier,
    batch: &[&Sample],
    optimizer: &mut Optimizer,
    lr: f64,
) -> Result<f64> {
    let shared: &dyn Classifier = model;
    let per_sample: Vec<(f64, Vec<f64>)> = batch
        .par_iter()
        .map(|s| shared.loss_and_grad(&s.features, s.label))
        .collect::<Result<_>>()?;
    let mut params = model.params();
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for (l, g) in &per_sample {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Training("non-finite gradient".into()));
    }
    optimizer.step(&mut params, &grad, lr)?;
    model.set_params(&params)?;
    Ok(loss * scale)
}

/// Fraction of samples whose predicted class equals the label.
pub fn evaluate(model: &Model, samples: &[Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("cannot evaluate on an empty sample set".into()));
    }
    let hits: Vec<bool> = samples
        .par_iter()
        .map(|s| model.predict(&s.features).map(|p| p == s.label))
        .collect::<Result<_>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / samples.len() as f64)
}
