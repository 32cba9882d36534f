use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::NUM_CLASSES;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "QMLP")]
    Qmlp,
    #[serde(rename = "QFF")]
    Qff,
    #[serde(rename = "QBP")]
    Qbp,
    #[serde(rename = "BaselineQNN")]
    BaselineQnn,
    #[serde(rename = "ClassicalMLP")]
    ClassicalMlp,
    #[serde(rename = "ClassicalFF")]
    ClassicalFf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Qmlp,
        ModelKind::Qff,
        ModelKind::Qbp,
        ModelKind::BaselineQnn,
        ModelKind::ClassicalMlp,
        ModelKind::ClassicalFf,
    ];

    pub fn is_quantum(self) -> bool {
        matches!(
            self,
            ModelKind::Qmlp | ModelKind::Qff | ModelKind::Qbp | ModelKind::BaselineQnn
        )
    }

    pub fn is_forward_forward(self) -> bool {
        matches!(self, ModelKind::Qff | ModelKind::ClassicalFf)
    }

    /// Kinds whose architecture reads `classical_widths`.
    pub fn uses_widths(self) -> bool {
        matches!(
            self,
            ModelKind::Qmlp | ModelKind::ClassicalMlp | ModelKind::ClassicalFf
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Qmlp => "QMLP",
            ModelKind::Qff => "QFF",
            ModelKind::Qbp => "QBP",
            ModelKind::BaselineQnn => "BaselineQNN",
            ModelKind::ClassicalMlp => "ClassicalMLP",
            ModelKind::ClassicalFf => "ClassicalFF",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "qmlp" => ModelKind::Qmlp,
            "qff" => ModelKind::Qff,
            "qbp" => ModelKind::Qbp,
            "baseline" | "baselineqnn" | "qnn" => ModelKind::BaselineQnn,
            "mlp" | "classicalmlp" => ModelKind::ClassicalMlp,
            "ff" | "classicalff" => ModelKind::ClassicalFf,
            _ => return Err(Error::config("model", format!("unknown model kind `{s}`"))),
        };
        Ok(kind)
    }
}

pub const MIN_QUBITS: usize = 2;
pub const MAX_MODEL_QUBITS: usize = 13;
pub const MAX_WIDTH: usize = 4096;

/// One point of the model search space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub num_qubits: usize,
    /// Repetitions of the entangling block.
    pub ansatz_depth: usize,
    pub classical_widths: Vec<usize>,
    /// Goodness threshold for forward-forward kinds.
    pub ff_threshold: f64,
    pub readout_classes: usize,
    pub seed: u64,
}

impl ModelSpec {
    /// Default architecture for each kind: 8 qubits, depth 2, threshold 1.
    pub fn default_for(kind: ModelKind) -> Self {
        let classical_widths = match kind {
            ModelKind::Qmlp => vec![16],
            ModelKind::ClassicalMlp => vec![32],
            ModelKind::ClassicalFf => vec![32, 32],
            _ => Vec::new(),
        };
        ModelSpec {
            kind,
            num_qubits: 8,
            ansatz_depth: 2,
            classical_widths,
            ff_threshold: 1.0,
            readout_classes: NUM_CLASSES,
            seed: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_QUBITS..=MAX_MODEL_QUBITS).contains(&self.num_qubits) {
            return Err(Error::config(
                "num_qubits",
                format!("{} outside {MIN_QUBITS}..={MAX_MODEL_QUBITS}", self.num_qubits),
            ));
        }
        if self.kind.is_quantum() && self.ansatz_depth < 1 {
            return Err(Error::config("ansatz_depth", "must be at least 1"));
        }
        if self.kind.is_forward_forward()
            && !(self.ff_threshold.is_finite() && self.ff_threshold > 0.0)
        {
            return Err(Error::config(
                "ff_threshold",
                format!("{} must be finite and positive", self.ff_threshold),
            ));
        }
        if self.readout_classes != NUM_CLASSES {
            return Err(Error::config(
                "readout_classes",
                format!("{} (must be {NUM_CLASSES})", self.readout_classes),
            ));
        }
        if let Some(w) = self
            .classical_widths
            .iter()
            .find(|w| !(1..=MAX_WIDTH).contains(*w))
        {
            return Err(Error::config(
                "classical_widths",
                format!("width {w} outside 1..={MAX_WIDTH}"),
            ));
        }
        if self.kind == ModelKind::ClassicalFf && self.classical_widths.is_empty() {
            return Err(Error::config(
                "classical_widths",
                "ClassicalFF needs at least one layer",
            ));
        }
        Ok(())
    }

    /// Stable JSON form; identical specs serialize to identical strings.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("ModelSpec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ModelKind::ALL {
            ModelSpec::default_for(kind).validate().unwrap();
        }
    }

    #[test]
    fn invariants() {
        let mut s = ModelSpec::default_for(ModelKind::Qff);
        s.num_qubits = 99;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::default_for(ModelKind::Qff);
        s.ff_threshold = 0.0;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::default_for(ModelKind::Qbp);
        s.ansatz_depth = 0;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::default_for(ModelKind::ClassicalMlp);
        s.ansatz_depth = 0;
        s.validate().unwrap();
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
        }
        assert_eq!("baseline".parse::<ModelKind>().unwrap(), ModelKind::BaselineQnn);
        assert!("cnn".parse::<ModelKind>().is_err());
    }
}
