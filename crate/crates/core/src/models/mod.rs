//! Model families behind one interface.

mod check;
mod classifier;
mod encoding;
mod ff;
mod quantum_layer;
mod spec;

pub use check::GradientCheck;
pub use classifier::{argmax, BaselineQnn, Classifier, ClassicalMlp, Qbp, Qmlp};
pub use encoding::{encode_features, encoding_circuit, fit_to_capacity, hardware_efficient_ansatz};
pub use ff::{
    ff_loss, ff_train_step, goodness, FfLayer, FfLayerState, FfNetwork, QFF_LAYERS,
};
pub use quantum_layer::{QuantumGrads, QuantumLayer};
pub use spec::{ModelKind, ModelSpec, MAX_MODEL_QUBITS, MAX_WIDTH, MIN_QUBITS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Qmlp(Qmlp),
    Qff(FfNetwork),
    Qbp(Qbp),
    BaselineQnn(BaselineQnn),
    ClassicalMlp(ClassicalMlp),
    ClassicalFf(FfNetwork),
}

/// Instantiates `spec` deterministically from `spec.seed`.
pub fn build_model(spec: &ModelSpec) -> Result<Model> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, depth) = (spec.num_qubits, spec.ansatz_depth);
    Ok(match spec.kind {
        ModelKind::Qmlp => Model::Qmlp(Qmlp::new(n, depth, &spec.classical_widths, &mut rng)?),
        ModelKind::Qff => Model::Qff(FfNetwork::quantum(n, depth, spec.ff_threshold, &mut rng)?),
        ModelKind::Qbp => Model::Qbp(Qbp::new(n, depth, &mut rng)?),
        ModelKind::BaselineQnn => Model::BaselineQnn(BaselineQnn::new(n, depth, &mut rng)?),
        ModelKind::ClassicalMlp => {
            Model::ClassicalMlp(ClassicalMlp::new(&spec.classical_widths, &mut rng))
        }
        ModelKind::ClassicalFf => Model::ClassicalFf(FfNetwork::classical(
            &spec.classical_widths,
            spec.ff_threshold,
            &mut rng,
        )),
    })
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Qmlp(_) => ModelKind::Qmlp,
            Model::Qff(_) => ModelKind::Qff,
            Model::Qbp(_) => ModelKind::Qbp,
            Model::BaselineQnn(_) => ModelKind::BaselineQnn,
            Model::ClassicalMlp(_) => ModelKind::ClassicalMlp,
            Model::ClassicalFf(_) => ModelKind::ClassicalFf,
        }
    }

    pub fn as_classifier(&self) -> Option<&dyn Classifier> {
        match self {
            Model::Qmlp(m) => Some(m),
            Model::Qbp(m) => Some(m),
            Model::BaselineQnn(m) => Some(m),
            Model::ClassicalMlp(m) => Some(m),
            Model::Qff(_) | Model::ClassicalFf(_) => None,
        }
    }

    pub fn as_classifier_mut(&mut self) -> Option<&mut dyn Classifier> {
        match self {
            Model::Qmlp(m) => Some(m),
            Model::Qbp(m) => Some(m),
            Model::BaselineQnn(m) => Some(m),
            Model::ClassicalMlp(m) => Some(m),
            Model::Qff(_) | Model::ClassicalFf(_) => None,
        }
    }

    pub fn as_ff(&self) -> Option<&FfNetwork> {
        match self {
            Model::Qff(n) | Model::ClassicalFf(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_ff_mut(&mut self) -> Option<&mut FfNetwork> {
        match self {
            Model::Qff(n) | Model::ClassicalFf(n) => Some(n),
            _ => None,
        }
    }

    /// Every trainable parameter, in a fixed order.
    pub fn trainable_params(&self) -> Vec<f64> {
        match self.as_ff() {
            Some(net) => net.params(),
            None => self.as_classifier().map(|c| c.params()).unwrap_or_default(),
        }
    }

    /// Quantum layers of the model, in forward order.
    pub fn quantum_layers(&self) -> Vec<&QuantumLayer> {
        match self {
            Model::Qmlp(m) => vec![m.quantum()],
            Model::Qbp(m) => vec![m.quantum()],
            Model::BaselineQnn(m) => vec![m.quantum()],
            Model::Qff(net) => net
                .layers()
                .iter()
                .filter_map(|l| match &l.layer {
                    FfLayer::Quantum(q) => Some(q),
                    FfLayer::Dense(_) => None,
                })
                .collect(),
            Model::ClassicalMlp(_) | Model::ClassicalFf(_) => Vec::new(),
        }
    }

    /// Overrides the parameter-shift constant of every quantum layer.
    pub fn set_shift(&mut self, shift: f64) {
        match self {
            Model::Qmlp(m) => m.quantum.set_shift(shift),
            Model::Qbp(m) => m.quantum.set_shift(shift),
            Model::BaselineQnn(m) => m.quantum.set_shift(shift),
            Model::Qff(net) => {
                for l in net.layers_mut() {
                    if let FfLayer::Quantum(q) = &mut l.layer {
                        q.set_shift(shift);
                    }
                }
            }
            Model::ClassicalMlp(_) | Model::ClassicalFf(_) => {}
        }
    }

    /// Class prediction: logit argmax, or overlay goodness for forward-forward.
    /// Ties resolve to the lowest class.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        match self {
            Model::Qff(net) | Model::ClassicalFf(net) => net.predict(features),
            _ => {
                let c = self.as_classifier().expect("non-FF models are classifiers");
                Ok(argmax(&c.logits(features)?))
            }
        }
    }
}
