use crate::error::{Error, Result};
use crate::sim::{Angle, Circuit, Gate};

/// Angle encoding with fixed angles: feature `2j` drives `RY` on qubit `j`,
/// feature `2j+1` drives `RZ` on qubit `j`; absent features encode as 0.
pub fn encode_features(features: &[f64], num_qubits: usize) -> Result<Circuit<f64>> {
    check_capacity(features.len(), num_qubits)?;
    let mut circuit = Circuit::new(num_qubits, 0)?;
    for q in 0..num_qubits {
        let at = |i: usize| features.get(i).copied().unwrap_or(0.0);
        circuit.push(Gate::ry(q, Angle::Fixed(at(2 * q))))?;
        circuit.push(Gate::rz(q, Angle::Fixed(at(2 * q + 1))))?;
    }
    Ok(circuit)
}

/// The same layout with angles read from parameter slots `0..2·num_qubits`.
pub fn encoding_circuit(num_qubits: usize) -> Result<Circuit<f64>> {
    let mut circuit = Circuit::new(num_qubits, 2 * num_qubits)?;
    for q in 0..num_qubits {
        circuit.push(Gate::ry(q, Angle::Ref(2 * q)))?;
        circuit.push(Gate::rz(q, Angle::Ref(2 * q + 1)))?;
    }
    Ok(circuit)
}

/// `depth` repetitions of `[RY(θ), RZ(θ)]` on every qubit followed by a CNOT ring.
pub fn hardware_efficient_ansatz(num_qubits: usize, depth: usize) -> Result<Circuit<f64>> {
    let mut circuit = Circuit::new(num_qubits, 2 * num_qubits * depth)?;
    let mut slot = 0;
    for _ in 0..depth {
        for q in 0..num_qubits {
            circuit.push(Gate::ry(q, Angle::Ref(slot)))?;
            circuit.push(Gate::rz(q, Angle::Ref(slot + 1)))?;
            slot += 2;
        }
        if num_qubits > 1 {
            for q in 0..num_qubits {
                circuit.push(Gate::cnot(q, (q + 1) % num_qubits))?;
            }
        }
    }
    Ok(circuit)
}

fn check_capacity(len: usize, num_qubits: usize) -> Result<()> {
    if len > 2 * num_qubits {
        return Err(Error::Shape(format!(
            "{len} features exceed the {}-angle capacity of {num_qubits} qubits",
            2 * num_qubits
        )));
    }
    Ok(())
}

/// Resizes a feature vector to exactly `capacity` encoding angles: shorter
/// inputs are zero-padded, longer ones are folded by averaging every feature
/// `i` into slot `i mod capacity`.
pub fn fit_to_capacity(features: &[f64], capacity: usize) -> Vec<f64> {
    if features.len() <= capacity {
        let mut out = features.to_vec();
        out.resize(capacity, 0.0);
        return out;
    }
    let mut sums = vec![0.0; capacity];
    let mut counts = vec![0usize; capacity];
    for (i, &v) in features.iter().enumerate() {
        sums[i % capacity] += v;
        counts[i % capacity] += 1;
    }
    sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect()
}
