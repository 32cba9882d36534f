use rand::Rng;

use super::encoding::fit_to_capacity;
use super::quantum_layer::QuantumLayer;
use crate::data::{NUM_CLASSES, POOLED_FEATURES};
use crate::error::{Error, Result};
use crate::gradients::{dense_backward, dense_forward, Activation, DenseLayer, GradTape};
use crate::sim::Observable;
use crate::training::softmax_cross_entropy;

use std::f64::consts::FRAC_PI_2;

/// Models trained end-to-end on softmax cross-entropy.
pub trait Classifier: Sync {
    fn logits(&self, features: &[f64]) -> Result<Vec<f64>>;

    /// Trainable parameters in a fixed order.
    fn params(&self) -> Vec<f64>;

    fn set_params(&mut self, params: &[f64]) -> Result<()>;

    /// Loss for one sample and its gradient in [`Classifier::params`] order.
    fn loss_and_grad(&self, features: &[f64], label: usize) -> Result<(f64, Vec<f64>)>;

    fn num_params(&self) -> usize {
        self.params().len()
    }
}

fn stack_params(layers: &[DenseLayer<f64>]) -> impl Iterator<Item = f64> + '_ {
    layers.iter().flat_map(|l| l.params())
}

fn load_stack<'a>(layers: &mut [DenseLayer<f64>], mut values: &'a [f64]) -> Result<&'a [f64]> {
    for layer in layers {
        values = layer.load_params(values)?;
    }
    Ok(values)
}

fn finish(rest: &[f64]) -> Result<()> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(Error::Shape(format!("{} surplus parameters", rest.len())))
    }
}

/// Runs `layers` recording on `tape`.
fn stack_forward(layers: &[DenseLayer<f64>], input: &[f64], tape: &mut GradTape<f64>) -> Result<Vec<f64>> {
    layers
        .iter()
        .try_fold(input.to_vec(), |x, layer| dense_forward(layer, &x, tape))
}

/// Backpropagates through `layers`; returns parameter gradients in layer
/// order and the gradient with respect to the stack input.
fn stack_backward(
    layers: &[DenseLayer<f64>],
    mut upstream: Vec<f64>,
    tape: &mut GradTape<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut per_layer = Vec::with_capacity(layers.len());
    for layer in layers.iter().rev() {
        let g = dense_backward(layer, &upstream, tape)?;
        upstream = g.input_grad;
        per_layer.push((g.weight_grad, g.bias_grad));
    }
    let grads = per_layer
        .into_iter()
        .rev()
        .flat_map(|(w, b)| w.into_iter().chain(b))
        .collect();
    Ok((grads, upstream))
}

fn init_stack<R: Rng + ?Sized>(
    input: usize,
    widths: &[usize],
    output: usize,
    hidden: Activation,
    last: Activation,
    rng: &mut R,
) -> Vec<DenseLayer<f64>> {
    let mut dims = vec![input];
    dims.extend_from_slice(widths);
    dims.push(output);
    dims.windows(2)
        .enumerate()
        .map(|(i, d)| {
            let act = if i + 2 == dims.len() { last } else { hidden };
            DenseLayer::init(d[1], d[0], act, rng)
        })
        .collect()
}

/// Classical dense stack, squashed to `[0, π]` angles, feeding a quantum
/// layer whose per-qubit `⟨Z⟩` goes through a linear readout.
#[derive(Clone, Debug, PartialEq)]
pub struct Qmlp {
    pub(crate) stack: Vec<DenseLayer<f64>>,
    pub(crate) quantum: QuantumLayer,
    pub(crate) readout: DenseLayer<f64>,
}

impl Qmlp {
    pub fn new<R: Rng + ?Sized>(
        num_qubits: usize,
        depth: usize,
        widths: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        let quantum = QuantumLayer::new(num_qubits, depth, QuantumLayer::per_qubit_z(num_qubits), rng)?;
        // last stack layer is tanh; (tanh + 1)·π/2 maps it onto [0, π]
        let stack = init_stack(
            POOLED_FEATURES,
            widths,
            quantum.input_len(),
            Activation::Tanh,
            Activation::Tanh,
            rng,
        );
        let readout = DenseLayer::init(NUM_CLASSES, num_qubits, Activation::Identity, rng);
        Ok(Qmlp {
            stack,
            quantum,
            readout,
        })
    }

    pub fn quantum(&self) -> &QuantumLayer {
        &self.quantum
    }

    pub fn readout_mut(&mut self) -> &mut DenseLayer<f64> {
        &mut self.readout
    }

    /// Encoding angles the quantum layer sees for `features`.
    pub fn angles(&self, features: &[f64]) -> Result<Vec<f64>> {
        let mut tape = GradTape::new();
        let a = stack_forward(&self.stack, features, &mut tape)?;
        Ok(squash(&a))
    }
}

fn squash(a: &[f64]) -> Vec<f64> {
    a.iter().map(|v| (v + 1.0) * FRAC_PI_2).collect()
}

impl Classifier for Qmlp {
    fn logits(&self, features: &[f64]) -> Result<Vec<f64>> {
        let e = self.quantum.forward(&self.angles(features)?)?;
        self.readout.forward(&e)
    }

    fn params(&self) -> Vec<f64> {
        stack_params(&self.stack)
            .chain(self.quantum.theta().iter().copied())
            .chain(self.readout.params())
            .collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        let rest = load_stack(&mut self.stack, params)?;
        let n = self.quantum.theta().len();
        if rest.len() < n {
            return Err(Error::Shape("too few parameters for the quantum layer".into()));
        }
        self.quantum.set_theta(&rest[..n])?;
        finish(self.readout.load_params(&rest[n..])?)
    }

    fn loss_and_grad(&self, features: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
        let mut tape = GradTape::new();
        let a = stack_forward(&self.stack, features, &mut tape)?;
        let angles = squash(&a);
        let e = self.quantum.forward(&angles)?;
        let mut head = GradTape::new();
        let logits = dense_forward(&self.readout, &e, &mut head)?;
        let (loss, dlogits) = softmax_cross_entropy(&logits, label)?;
        let rg = dense_backward(&self.readout, &dlogits, &mut head)?;
        let qg = self.quantum.backward(&angles, &rg.input_grad, true)?;
        let da: Vec<f64> = qg
            .input
            .expect("input gradient requested")
            .iter()
            .map(|g| g * FRAC_PI_2)
            .collect();
        let (stack_grad, _) = stack_backward(&self.stack, da, &mut tape)?;
        let grad = stack_grad
            .into_iter()
            .chain(qg.theta)
            .chain(rg.weight_grad)
            .chain(rg.bias_grad)
            .collect();
        Ok((loss, grad))
    }
}

/// Direct angle encoding, trainable ansatz, per-qubit `⟨Z⟩`, linear readout.
/// Circuit angles train by parameter-shift, the readout by backprop.
#[derive(Clone, Debug, PartialEq)]
pub struct Qbp {
    pub(crate) quantum: QuantumLayer,
    pub(crate) readout: DenseLayer<f64>,
}

impl Qbp {
    pub fn new<R: Rng + ?Sized>(num_qubits: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let quantum = QuantumLayer::new(num_qubits, depth, QuantumLayer::per_qubit_z(num_qubits), rng)?;
        let readout = DenseLayer::init(NUM_CLASSES, num_qubits, Activation::Identity, rng);
        Ok(Qbp { quantum, readout })
    }

    pub fn quantum(&self) -> &QuantumLayer {
        &self.quantum
    }

    pub fn quantum_mut(&mut self) -> &mut QuantumLayer {
        &mut self.quantum
    }

    pub fn readout_mut(&mut self) -> &mut DenseLayer<f64> {
        &mut self.readout
    }
}

impl Classifier for Qbp {
    fn logits(&self, features: &[f64]) -> Result<Vec<f64>> {
        let angles = fit_to_capacity(features, self.quantum.input_len());
        self.readout.forward(&self.quantum.forward(&angles)?)
    }

    fn params(&self) -> Vec<f64> {
        self.quantum
            .theta()
            .iter()
            .copied()
            .chain(self.readout.params())
            .collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        let n = self.quantum.theta().len();
        if params.len() < n {
            return Err(Error::Shape("too few parameters for the quantum layer".into()));
        }
        self.quantum.set_theta(&params[..n])?;
        finish(self.readout.load_params(&params[n..])?)
    }

    fn loss_and_grad(&self, features: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
        let angles = fit_to_capacity(features, self.quantum.input_len());
        let e = self.quantum.forward(&angles)?;
        let mut head = GradTape::new();
        let logits = dense_forward(&self.readout, &e, &mut head)?;
        let (loss, dlogits) = softmax_cross_entropy(&logits, label)?;
        let rg = dense_backward(&self.readout, &dlogits, &mut head)?;
        let qg = self.quantum.backward(&angles, &rg.input_grad, false)?;
        let grad = qg
            .theta
            .into_iter()
            .chain(rg.weight_grad)
            .chain(rg.bias_grad)
            .collect();
        Ok((loss, grad))
    }
}

/// Post-variational baseline: frozen random circuit, fixed `Z_j` and ring
/// `Z_j Z_{j+1}` observables, trainable linear readout only.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineQnn {
    pub(crate) quantum: QuantumLayer,
    pub(crate) readout: DenseLayer<f64>,
}

impl BaselineQnn {
    pub fn new<R: Rng + ?Sized>(num_qubits: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let observables = Self::observables(num_qubits);
        let quantum = QuantumLayer::new(num_qubits, depth, observables, rng)?;
        let readout = DenseLayer::init(NUM_CLASSES, quantum.output_len(), Activation::Identity, rng);
        Ok(BaselineQnn { quantum, readout })
    }

    /// `Z_j` for every qubit, then `Z_j Z_{(j+1) mod n}`.
    pub fn observables(num_qubits: usize) -> Vec<Observable<f64>> {
        (0..num_qubits)
            .map(Observable::z)
            .chain((0..num_qubits).map(|j| Observable::zz(j, (j + 1) % num_qubits)))
            .collect()
    }

    pub fn quantum(&self) -> &QuantumLayer {
        &self.quantum
    }

    pub fn readout_mut(&mut self) -> &mut DenseLayer<f64> {
        &mut self.readout
    }

    /// Frozen-circuit expectation features.
    pub fn quantum_features(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.quantum
            .forward(&fit_to_capacity(features, self.quantum.input_len()))
    }
}

impl Classifier for BaselineQnn {
    fn logits(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.readout.forward(&self.quantum_features(features)?)
    }

    fn params(&self) -> Vec<f64> {
        self.readout.params().collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        finish(self.readout.load_params(params)?)
    }

    fn loss_and_grad(&self, features: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
        let q = self.quantum_features(features)?;
        let mut head = GradTape::new();
        let logits = dense_forward(&self.readout, &q, &mut head)?;
        let (loss, dlogits) = softmax_cross_entropy(&logits, label)?;
        let rg = dense_backward(&self.readout, &dlogits, &mut head)?;
        Ok((loss, rg.weight_grad.into_iter().chain(rg.bias_grad).collect()))
    }
}

/// ReLU multi-layer perceptron trained by backpropagation.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMlp {
    pub(crate) layers: Vec<DenseLayer<f64>>,
}

impl ClassicalMlp {
    pub fn new<R: Rng + ?Sized>(widths: &[usize], rng: &mut R) -> Self {
        ClassicalMlp {
            layers: init_stack(
                POOLED_FEATURES,
                widths,
                NUM_CLASSES,
                Activation::ReLU,
                Activation::Identity,
                rng,
            ),
        }
    }

    pub fn from_layers(layers: Vec<DenseLayer<f64>>) -> Self {
        ClassicalMlp { layers }
    }
}

impl Classifier for ClassicalMlp {
    fn logits(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.layers
            .iter()
            .try_fold(features.to_vec(), |x, l| l.forward(&x))
    }

    fn params(&self) -> Vec<f64> {
        stack_params(&self.layers).collect()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        finish(load_stack(&mut self.layers, params)?)
    }

    fn loss_and_grad(&self, features: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
        let mut tape = GradTape::new();
        let logits = stack_forward(&self.layers, features, &mut tape)?;
        let (loss, dlogits) = softmax_cross_entropy(&logits, label)?;
        let (grad, _) = stack_backward(&self.layers, dlogits, &mut tape)?;
        Ok((loss, grad))
    }
}

/// Argmax with ties resolved to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}
