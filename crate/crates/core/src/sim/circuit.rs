use super::gate::{Gate, GateKind};
use super::state::{Statevector, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordered gate program over `num_qubits` qubits with `num_params` parameter slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate<T>>,
}

/// Result of [`Circuit::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CircuitReport {
    pub unused_params: Vec<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(num_qubits: usize, num_params: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::config(
                "num_qubits",
                format!("{num_qubits} outside 1..={MAX_QUBITS}"),
            ));
        }
        Ok(Circuit {
            num_qubits,
            num_params,
            gates: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<&mut Self> {
        self.check_gate(&gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    fn check_gate(&self, gate: &Gate<T>) -> Result<()> {
        let wires = gate.wires();
        if wires.len() != gate.kind().arity() {
            return Err(Error::Shape(format!(
                "{:?} needs {} wires, got {}",
                gate.kind(),
                gate.kind().arity(),
                wires.len()
            )));
        }
        if let Some(&q) = wires.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::Shape(format!(
                "{:?} wire {q} out of range for {} qubits",
                gate.kind(),
                self.num_qubits
            )));
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::Shape(format!(
                "{:?} wires must be distinct, got {wires:?}",
                gate.kind()
            )));
        }
        if gate.kind().is_parametrized() != gate.angle().is_some() {
            return Err(Error::Validation(format!(
                "{:?} angle presence does not match its kind",
                gate.kind()
            )));
        }
        if let Some(k) = gate.param_ref() {
            if k >= self.num_params {
                return Err(Error::ParamBinding(format!(
                    "parameter {k} out of range for {} slots",
                    self.num_params
                )));
            }
        }
        Ok(())
    }

    /// Reports parameter slots no gate references.
    pub fn validate(&self) -> CircuitReport {
        let mut used = vec![false; self.num_params];
        for k in self.gates.iter().filter_map(Gate::param_ref) {
            used[k] = true;
        }
        CircuitReport {
            unused_params: (0..self.num_params).filter(|&k| !used[k]).collect(),
        }
    }

    /// `self` followed by `next`; `next`'s parameter slots are appended after ours.
    pub fn compose(&self, next: &Circuit<T>) -> Result<Self> {
        if next.num_qubits != self.num_qubits {
            return Err(Error::Shape(format!(
                "cannot compose {}-qubit and {}-qubit circuits",
                self.num_qubits, next.num_qubits
            )));
        }
        let mut out = Circuit {
            num_qubits: self.num_qubits,
            num_params: self.num_params + next.num_params,
            gates: self.gates.clone(),
        };
        out.gates
            .extend(next.gates.iter().map(|g| g.with_offset_ref(self.num_params)));
        Ok(out)
    }

    /// Indices of gates whose angle is a parameter reference.
    pub fn param_gates(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.param_ref().map(|k| (i, k)))
    }

    pub(crate) fn check_run(&self, params: &[T], state: &Statevector<T>) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParamBinding(format!(
                "{} parameters supplied for {} slots",
                params.len(),
                self.num_params
            )));
        }
        if state.num_qubits() != self.num_qubits {
            return Err(Error::Shape(format!(
                "{}-qubit input for a {}-qubit circuit",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        Ok(())
    }

    pub(crate) fn apply_to(&self, state: &mut Statevector<T>, params: &[T]) -> Result<()> {
        self.check_run(params, state)?;
        for gate in &self.gates {
            state.apply(gate, params)?;
        }
        Ok(())
    }

    /// Runs gates `from..` on `state`, replacing the angle of gate `shifted.0`
    /// with `resolved + shifted.1`. Arguments must already be checked.
    pub(crate) fn apply_range_shifted(
        &self,
        state: &mut Statevector<T>,
        params: &[T],
        from: usize,
        shifted: Option<(usize, T)>,
    ) {
        for (i, gate) in self.gates.iter().enumerate().skip(from) {
            let mut theta = match gate.angle() {
                None => T::zero(),
                Some(super::Angle::Fixed(v)) => v,
                Some(super::Angle::Ref(k)) => params[k],
            };
            if let Some((idx, delta)) = shifted {
                if idx == i {
                    theta += delta;
                }
            }
            state.apply_resolved(gate, theta);
        }
    }

    /// First gate that references a slot in `slots` but is not a
    /// single-qubit Pauli rotation.
    pub(crate) fn first_unshiftable(
        &self,
        slots: std::ops::Range<usize>,
    ) -> Option<(usize, GateKind)> {
        self.param_gates()
            .find(|&(i, k)| slots.contains(&k) && !self.gates[i].kind().is_rotation())
            .map(|(i, _)| (i, self.gates[i].kind()))
    }
}
