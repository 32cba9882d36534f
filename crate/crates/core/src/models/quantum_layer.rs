use rand::Rng;

use super::encoding::{encoding_circuit, hardware_efficient_ansatz};
use crate::error::{Error, Result};
use crate::gradients::{param_shift_jacobian, standard_shift};
use crate::sim::{Circuit, Observable, Pauli, Statevector};

/// Angle-encoding block followed by a trainable ansatz and a set of readout
/// observables.
///
/// The circuit reads input angles from slots `0..2n` and the ansatz
/// parameters `theta` from the slots after them.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumLayer {
    circuit: Circuit<f64>,
    theta: Vec<f64>,
    readout: Vec<Observable<f64>>,
    /// `Some(q)` per observable when it is a bare `Z_q` (fast path).
    z_wires: Option<Vec<usize>>,
    shift: f64,
}

/// Gradients returned by [`QuantumLayer::backward`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGrads {
    pub theta: Vec<f64>,
    pub input: Option<Vec<f64>>,
}

impl QuantumLayer {
    /// Ansatz angles drawn uniformly from `[-π, π]`.
    pub fn new<R: Rng + ?Sized>(
        num_qubits: usize,
        depth: usize,
        readout: Vec<Observable<f64>>,
        rng: &mut R,
    ) -> Result<Self> {
        let ansatz = hardware_efficient_ansatz(num_qubits, depth)?;
        let pi = std::f64::consts::PI;
        let theta = (0..ansatz.num_params())
            .map(|_| rng.gen_range(-pi..=pi))
            .collect();
        Self::from_parts(num_qubits, depth, theta, readout)
    }

    pub fn from_parts(
        num_qubits: usize,
        depth: usize,
        theta: Vec<f64>,
        readout: Vec<Observable<f64>>,
    ) -> Result<Self> {
        let ansatz = hardware_efficient_ansatz(num_qubits, depth)?;
        if theta.len() != ansatz.num_params() {
            return Err(Error::Shape(format!(
                "{} ansatz angles for {} slots",
                theta.len(),
                ansatz.num_params()
            )));
        }
        if let Some(w) = readout.iter().filter_map(Observable::max_wire).max() {
            if w >= num_qubits {
                return Err(Error::Shape(format!("readout wire {w} out of range")));
            }
        }
        let circuit = encoding_circuit(num_qubits)?.compose(&ansatz)?;
        let z_wires = readout.iter().map(single_z_wire).collect();
        Ok(QuantumLayer {
            circuit,
            theta,
            readout,
            z_wires,
            shift: standard_shift(),
        })
    }

    pub fn per_qubit_z(num_qubits: usize) -> Vec<Observable<f64>> {
        (0..num_qubits).map(Observable::z).collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    /// Number of input angles (`2 · num_qubits`).
    pub fn input_len(&self) -> usize {
        2 * self.num_qubits()
    }

    pub fn output_len(&self) -> usize {
        self.readout.len()
    }

    /// Encoding followed by ansatz.
    pub fn circuit(&self) -> &Circuit<f64> {
        &self.circuit
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.theta.len() {
            return Err(Error::Shape(format!(
                "{} angles for {} slots",
                theta.len(),
                self.theta.len()
            )));
        }
        self.theta.copy_from_slice(theta);
        Ok(())
    }

    pub fn readout(&self) -> &[Observable<f64>] {
        &self.readout
    }

    /// Overrides the parameter-shift constant. Anything other than `π/2`
    /// gives wrong gradients; used to check that gradient checks fail.
    pub fn set_shift(&mut self, shift: f64) {
        self.shift = shift;
    }

    /// Encoding angles followed by ansatz angles.
    pub fn full_params(&self, angles: &[f64]) -> Result<Vec<f64>> {
        if angles.len() != self.input_len() {
            return Err(Error::Shape(format!(
                "quantum layer takes {} angles, got {}",
                self.input_len(),
                angles.len()
            )));
        }
        Ok(angles.iter().chain(&self.theta).copied().collect())
    }

    fn measure(&self, state: &Statevector<f64>) -> Vec<f64> {
        match &self.z_wires {
            Some(wires) => {
                let z = state.z_expectations();
                wires.iter().map(|&q| z[q]).collect()
            }
            None => self
                .readout
                .iter()
                .map(|o| state.expectation(o).expect("readout wires checked"))
                .collect(),
        }
    }

    /// Readout expectations for the given encoding angles.
    pub fn forward(&self, angles: &[f64]) -> Result<Vec<f64>> {
        let params = self.full_params(angles)?;
        let state = crate::sim::run(&self.circuit, &params, &Statevector::new(self.num_qubits())?)?;
        Ok(self.measure(&state))
    }

    /// Vector-Jacobian product: gradients of `Σ_j upstream_j · E_j` with
    /// respect to `theta` and, if requested, the encoding angles.
    pub fn backward(
        &self,
        angles: &[f64],
        upstream: &[f64],
        with_input_grad: bool,
    ) -> Result<QuantumGrads> {
        if upstream.len() != self.readout.len() {
            return Err(Error::Shape(format!(
                "upstream has {} entries for {} readouts",
                upstream.len(),
                self.readout.len()
            )));
        }
        let params = self.full_params(angles)?;
        let n_in = self.input_len();
        let first = if with_input_grad { 0 } else { n_in };
        let jac = param_shift_jacobian(
            &self.circuit,
            &params,
            &Statevector::new(self.num_qubits())?,
            first..params.len(),
            self.shift,
            |s| {
                let e = self.measure(s);
                vec![e.iter().zip(upstream).map(|(a, b)| a * b).sum()]
            },
        )?;
        let flat: Vec<f64> = jac.into_iter().map(|row| row[0]).collect();
        let (input, theta) = if with_input_grad {
            let (i, t) = flat.split_at(n_in);
            (Some(i.to_vec()), t.to_vec())
        } else {
            (None, flat)
        };
        Ok(QuantumGrads { theta, input })
    }
}

fn single_z_wire(obs: &Observable<f64>) -> Option<usize> {
    match obs.terms() {
        [term] if term.coefficient() == 1.0 && term.paulis().len() == 1 => {
            let (&q, &p) = term.paulis().iter().next()?;
            (p == Pauli::Z).then_some(q)
        }
        _ => None,
    }
}
