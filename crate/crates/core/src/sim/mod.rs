//! Dense statevector simulation of parametrized circuits.
//!
//! Basis ordering is little-endian: qubit 0 is the least significant bit of
//! the basis index. Rotations follow `exp(-iθP/2)`.

mod circuit;
mod gate;
mod observable;
mod state;

pub use circuit::{Circuit, CircuitReport};
pub use gate::{Angle, Gate, GateKind};
pub use observable::{Observable, Pauli, PauliTerm};
pub use state::{Statevector, MAX_QUBITS};

use crate::error::Result;
use crate::scalar::Real;

/// `|0…0⟩` on `num_qubits` qubits.
pub fn init_state<T: Real>(num_qubits: usize) -> Result<Statevector<T>> {
    Statevector::new(num_qubits)
}

pub fn apply_gate<T: Real>(
    state: &Statevector<T>,
    gate: &Gate<T>,
    params: &[T],
) -> Result<Statevector<T>> {
    let mut out = state.clone();
    out.apply(gate, params)?;
    Ok(out)
}

/// Applies every gate of `circuit` to a copy of `input`, in order.
pub fn run<T: Real>(
    circuit: &Circuit<T>,
    params: &[T],
    input: &Statevector<T>,
) -> Result<Statevector<T>> {
    let mut out = input.clone();
    circuit.apply_to(&mut out, params)?;
    Ok(out)
}

pub fn expectation<T: Real>(state: &Statevector<T>, obs: &Observable<T>) -> Result<T> {
    state.expectation(obs)
}

pub fn probabilities<T: Real>(state: &Statevector<T>) -> Vec<T> {
    state.probabilities()
}
