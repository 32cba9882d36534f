use crate::data::overlay_label;
use crate::error::{Error, Result};
use crate::gradients::{central_difference, GradientComparison};
use crate::training::softmax_cross_entropy;

use super::Model;

/// Analytic gradients and their central-difference counterparts for one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
}

impl GradientCheck {
    pub fn comparison(&self) -> GradientComparison {
        GradientComparison::new(&self.analytic, &self.numeric)
    }
}

impl Model {
    /// Checks every trainable gradient on one labelled sample. Classifiers
    /// use the cross-entropy loss; forward-forward layers use their local
    /// goodness on the positive overlay, each with its own input held fixed.
    pub fn gradient_check(&self, features: &[f64], label: usize, epsilon: f64) -> Result<GradientCheck> {
        if let Some(net) = self.as_ff() {
            let inputs = net.layer_inputs(&overlay_label(features, label)?)?;
            let mut check = GradientCheck {
                analytic: Vec::new(),
                numeric: Vec::new(),
            };
            for (state, input) in net.layers().iter().zip(&inputs) {
                let (_, grad) = state.layer.goodness_and_grad(input)?;
                let numeric = central_difference(
                    |p| {
                        let mut layer = state.layer.clone();
                        layer.set_params(p)?;
                        Ok(layer.goodness_and_grad(input)?.0)
                    },
                    &state.layer.params(),
                    epsilon,
                )?;
                check.analytic.extend(grad);
                check.numeric.extend(numeric);
            }
            return Ok(check);
        }
        let model = self
            .as_classifier()
            .ok_or_else(|| Error::State("model is neither a classifier nor forward-forward".into()))?;
        let (_, analytic) = model.loss_and_grad(features, label)?;
        let numeric = central_difference(
            |p| {
                let mut probe = self.clone();
                let c = probe.as_classifier_mut().expect("classifier");
                c.set_params(p)?;
                Ok(softmax_cross_entropy(&c.logits(features)?, label)?.0)
            },
            &model.params(),
            epsilon,
        )?;
        Ok(GradientCheck { analytic, numeric })
    }
}

#[cfg(test)]
mod tests {
    use crate::data::two_blob_toy;
    use crate::models::{build_model, ModelKind, ModelSpec};

    #[test]
    fn every_kind_passes() {
        let sample = &two_blob_toy(2, 3)[1];
        for kind in ModelKind::ALL {
            let mut spec = ModelSpec::default_for(kind);
            spec.num_qubits = 4;
            let model = build_model(&spec).unwrap();
            let cmp = model.gradient_check(&sample.features, sample.label, 1e-5).unwrap().comparison();
            assert_eq!(cmp.count, model.trainable_params().len(), "{kind:?}");
            assert!(cmp.max_abs < 1e-6, "{kind:?}: {cmp:?}");
        }
    }

    #[test]
    fn corrupted_shift_is_caught() {
        let sample = &two_blob_toy(2, 3)[0];
        let mut spec = ModelSpec::default_for(ModelKind::Qbp);
        spec.num_qubits = 4;
        let mut model = build_model(&spec).unwrap();
        model.set_shift(1.0);
        let cmp = model.gradient_check(&sample.features, sample.label, 1e-5).unwrap().comparison();
        assert!(cmp.max_abs > 1e-3, "{cmp:?}");
    }
}
