//! Forward-forward networks: every layer is trained locally to push its
//! goodness above a threshold on label-overlaid real data and below it on
//! wrong-label data. No gradient crosses layer boundaries.

use rand::Rng;
use rayon::prelude::*;

use super::classifier::argmax;
use super::encoding::fit_to_capacity;
use super::quantum_layer::QuantumLayer;
use crate::data::{make_negative, overlay_label, Sample, NUM_CLASSES, POOLED_FEATURES};
use crate::error::{Error, Result};
use crate::gradients::{dense_backward, dense_forward, Activation, DenseLayer, GradTape};
use crate::training::{sigmoid, softplus, Optimizer, OptimizerKind};

use std::f64::consts::FRAC_PI_2;

/// `Σ_j v_j²` over a layer's activities (per-qubit `⟨Z⟩` for quantum layers).
pub fn goodness(activities: &[f64]) -> f64 {
    activities.iter().map(|v| v * v).sum()
}

/// `softplus(θ − g_pos) + softplus(g_neg − θ)`.
pub fn ff_loss(g_pos: f64, g_neg: f64, threshold: f64) -> f64 {
    softplus(threshold - g_pos) + softplus(g_neg - threshold)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FfLayer {
    Quantum(QuantumLayer),
    Dense(DenseLayer<f64>),
}

impl FfLayer {
    pub fn input_len(&self) -> usize {
        match self {
            FfLayer::Quantum(q) => q.input_len(),
            FfLayer::Dense(d) => d.in_dim(),
        }
    }

    pub fn activities(&self, input: &[f64]) -> Result<Vec<f64>> {
        match self {
            FfLayer::Quantum(q) => q.forward(input),
            FfLayer::Dense(d) => d.forward(input),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            FfLayer::Quantum(q) => q.theta().to_vec(),
            FfLayer::Dense(d) => d.params().collect(),
        }
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        match self {
            FfLayer::Quantum(q) => q.set_theta(params),
            FfLayer::Dense(d) => {
                let rest = d.load_params(params)?;
                if rest.is_empty() {
                    Ok(())
                } else {
                    Err(Error::Shape(format!("{} surplus parameters", rest.len())))
                }
            }
        }
    }

    /// Goodness of `input` and its gradient with respect to the layer's parameters.
    pub fn goodness_and_grad(&self, input: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            FfLayer::Quantum(q) => {
                let e = q.forward(input)?;
                let up: Vec<f64> = e.iter().map(|v| 2.0 * v).collect();
                Ok((goodness(&e), q.backward(input, &up, false)?.theta))
            }
            FfLayer::Dense(d) => {
                let mut tape = GradTape::new();
                let h = dense_forward(d, input, &mut tape)?;
                let up: Vec<f64> = h.iter().map(|v| 2.0 * v).collect();
                let g = dense_backward(d, &up, &mut tape)?;
                Ok((goodness(&h), g.weight_grad.into_iter().chain(g.bias_grad).collect()))
            }
        }
    }
}

/// One forward-forward layer with its threshold and optimizer state.
#[derive(Clone, Debug, PartialEq)]
pub struct FfLayerState {
    pub layer: FfLayer,
    pub threshold: f64,
    pub optimizer: Optimizer,
}

impl FfLayerState {
    pub fn new(layer: FfLayer, threshold: f64, optimizer: OptimizerKind) -> Self {
        let n = layer.params().len();
        FfLayerState {
            layer,
            threshold,
            optimizer: Optimizer::new(optimizer, n),
        }
    }

    /// Mean forward-forward loss of the batches, without updating.
    pub fn batch_loss(&self, positive: &[Vec<f64>], negative: &[Vec<f64>]) -> Result<f64> {
        let g = |x: &Vec<f64>| self.layer.activities(x).map(|a| goodness(&a));
        let pos: Vec<f64> = positive.iter().map(g).collect::<Result<_>>()?;
        let neg: Vec<f64> = negative.iter().map(g).collect::<Result<_>>()?;
        Ok(mean(pos.iter().map(|gp| softplus(self.threshold - gp)))
            + mean(neg.iter().map(|gn| softplus(gn - self.threshold))))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n.max(1) as f64
}

/// One optimizer step of `state` on the mean forward-forward loss
/// `mean_pos softplus(θ − g) + mean_neg softplus(g − θ)`, which equals the
/// mean of [`ff_loss`] over index-paired batches. Returns the loss before
/// the step. Only `state` changes.
pub fn ff_train_step(
    state: &mut FfLayerState,
    positive: &[Vec<f64>],
    negative: &[Vec<f64>],
    learning_rate: f64,
) -> Result<f64> {
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::Input("forward-forward batches must be nonempty".into()));
    }
    let arity = state.layer.input_len();
    if let Some(x) = positive.iter().chain(negative).find(|x| x.len() != arity) {
        return Err(Error::Shape(format!(
            "forward-forward layer takes {arity} inputs, got {}",
            x.len()
        )));
    }
    let threshold = state.threshold;
    let layer = &state.layer;
    let tagged: Vec<(&Vec<f64>, bool)> = positive
        .iter()
        .map(|x| (x, true))
        .chain(negative.iter().map(|x| (x, false)))
        .collect();
    let per_sample: Vec<(f64, Vec<f64>)> = tagged
        .par_iter()
        .map(|&(x, is_pos)| {
            let (g, dg) = layer.goodness_and_grad(x)?;
            let (loss, dloss_dg, weight) = if is_pos {
                (softplus(threshold - g), -sigmoid(threshold - g), positive.len())
            } else {
                (softplus(g - threshold), sigmoid(g - threshold), negative.len())
            };
            let w = 1.0 / weight as f64;
            Ok((loss * w, dg.into_iter().map(|v| v * dloss_dg * w).collect()))
        })
        .collect::<Result<_>>()?;

    let mut params = layer.params();
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for (l, g) in per_sample {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    state.optimizer.step(&mut params, &grad, learning_rate)?;
    state.layer.set_params(&params)?;
    Ok(loss)
}

/// A stack of forward-forward layers (quantum or dense).
#[derive(Clone, Debug, PartialEq)]
pub struct FfNetwork {
    layers: Vec<FfLayerState>,
}

/// Number of quantum forward-forward layers.
pub const QFF_LAYERS: usize = 2;

impl FfNetwork {
    /// Two quantum layers; the second re-encodes the first's `⟨Z⟩` vector.
    pub fn quantum<R: Rng + ?Sized>(
        num_qubits: usize,
        depth: usize,
        threshold: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let layers = (0..QFF_LAYERS)
            .map(|_| {
                let q = QuantumLayer::new(num_qubits, depth, QuantumLayer::per_qubit_z(num_qubits), rng)?;
                Ok(FfLayerState::new(FfLayer::Quantum(q), threshold, OptimizerKind::Adam))
            })
            .collect::<Result<_>>()?;
        Ok(FfNetwork { layers })
    }

    /// ReLU dense layers of the given widths.
    pub fn classical<R: Rng + ?Sized>(widths: &[usize], threshold: f64, rng: &mut R) -> Self {
        let mut fan_in = POOLED_FEATURES;
        let layers = widths
            .iter()
            .map(|&w| {
                let d = DenseLayer::init(w, fan_in, Activation::ReLU, rng);
                fan_in = w;
                FfLayerState::new(FfLayer::Dense(d), threshold, OptimizerKind::Adam)
            })
            .collect();
        FfNetwork { layers }
    }

    pub fn from_layers(layers: Vec<FfLayerState>) -> Self {
        FfNetwork { layers }
    }

    pub fn layers(&self) -> &[FfLayerState] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [FfLayerState] {
        &mut self.layers
    }

    pub fn reset_optimizers(&mut self, kind: OptimizerKind) {
        for l in &mut self.layers {
            l.optimizer = Optimizer::new(kind, l.layer.params().len());
        }
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.layer.params()).collect()
    }

    /// Input to layer 0 for already-overlaid features.
    fn first_input(&self, overlaid: &[f64]) -> Vec<f64> {
        match &self.layers[0].layer {
            FfLayer::Quantum(q) => fit_to_capacity(overlaid, q.input_len()),
            FfLayer::Dense(_) => overlaid.to_vec(),
        }
    }

    /// Maps one layer's activities to the next layer's input: `⟨Z⟩` values
    /// become RY angles `(1 − z)·π/2`; dense activities are length-normalized.
    fn next_input(layer: &FfLayer, activities: &[f64]) -> Vec<f64> {
        match layer {
            FfLayer::Quantum(q) => {
                let mut angles = vec![0.0; q.input_len()];
                for (j, z) in activities.iter().enumerate().take(q.num_qubits()) {
                    angles[2 * j] = (1.0 - z) * FRAC_PI_2;
                }
                angles
            }
            FfLayer::Dense(_) => {
                let norm = activities.iter().map(|v| v * v).sum::<f64>().sqrt();
                activities.iter().map(|v| v / (norm + 1e-8)).collect()
            }
        }
    }

    /// Inputs to layers `0..=upto` for overlaid features.
    fn inputs_through(&self, overlaid: &[f64], upto: usize) -> Result<Vec<Vec<f64>>> {
        let mut inputs = vec![self.first_input(overlaid)];
        for k in 0..upto {
            let act = self.layers[k].layer.activities(&inputs[k])?;
            inputs.push(Self::next_input(&self.layers[k + 1].layer, &act));
        }
        Ok(inputs)
    }

    /// Input seen by every layer for overlaid features.
    pub fn layer_inputs(&self, overlaid: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.inputs_through(overlaid, self.layers.len() - 1)
    }

    /// Per-layer goodness for overlaid features.
    pub fn layer_goodness(&self, overlaid: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut input = self.first_input(overlaid);
        for (k, state) in self.layers.iter().enumerate() {
            let act = state.layer.activities(&input)?;
            out.push(goodness(&act));
            if let Some(next) = self.layers.get(k + 1) {
                input = Self::next_input(&next.layer, &act);
            }
        }
        Ok(out)
    }

    /// Class whose overlay maximizes total goodness; ties go to the lowest class.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        let scores = (0..NUM_CLASSES)
            .map(|c| {
                let g = self.layer_goodness(&overlay_label(features, c)?)?;
                Ok(g.iter().sum())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(argmax(&scores))
    }

    /// Greedy layer-wise update on one batch: negatives get fresh wrong
    /// labels from `rng`. Returns the summed per-layer loss.
    pub fn train_batch<R: Rng + ?Sized>(
        &mut self,
        batch: &[&Sample],
        learning_rate: f64,
        rng: &mut R,
    ) -> Result<f64> {
        let positive: Vec<Vec<f64>> = batch
            .iter()
            .map(|s| overlay_label(&s.features, s.label))
            .collect::<Result<_>>()?;
        let negative: Vec<Vec<f64>> = batch
            .iter()
            .map(|s| make_negative(s, rng).map(|n| n.features))
            .collect::<Result<_>>()?;
        let mut total = 0.0;
        for k in 0..self.layers.len() {
            let pos = positive
                .iter()
                .map(|x| self.inputs_through(x, k).map(|mut v| v.swap_remove(k)))
                .collect::<Result<Vec<_>>>()?;
            let neg = negative
                .iter()
                .map(|x| self.inputs_through(x, k).map(|mut v| v.swap_remove(k)))
                .collect::<Result<Vec<_>>>()?;
            total += ff_train_step(&mut self.layers[k], &pos, &neg, learning_rate)?;
        }
        Ok(total)
    }
}
