use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{Circuit, Observable, Statevector};

/// `π/2`, exact for `exp(-iθP/2)` generators.
pub fn standard_shift<T: Real>() -> T {
    T::FRAC_PI_2()
}

/// `∂⟨obs⟩/∂θ_k` for every parameter slot of `circuit`.
pub fn param_shift_grad<T: Real>(
    circuit: &Circuit<T>,
    obs: &Observable<T>,
    params: &[T],
    input: &Statevector<T>,
) -> Result<Vec<T>> {
    param_shift_grad_with(circuit, obs, params, input, standard_shift())
}

/// As [`param_shift_grad`] with an explicit shift. Only `π/2` yields the
/// exact derivative; other values exist for negative-control checks.
pub fn param_shift_grad_with<T: Real>(
    circuit: &Circuit<T>,
    obs: &Observable<T>,
    params: &[T],
    input: &Statevector<T>,
    shift: T,
) -> Result<Vec<T>> {
    if let Some(w) = obs.max_wire() {
        if w >= circuit.num_qubits() {
            return Err(Error::Shape(format!(
                "observable wire {w} out of range for {} qubits",
                circuit.num_qubits()
            )));
        }
    }
    let jac = param_shift_jacobian(circuit, params, input, 0..circuit.num_params(), shift, |s| {
        // wires were checked above
        vec![s.expectation(obs).unwrap_or_else(|_| T::zero())]
    })?;
    Ok(jac.into_iter().map(|row| row[0]).collect())
}

/// Derivatives of a vector-valued `readout` with respect to the slots in
/// `slots`. Row `k - slots.start` holds `∂readout/∂θ_k`.
///
/// A slot shared by several gates gets one shifted pair per occurrence and
/// the contributions are summed in gate order. States before each shifted
/// gate are computed once and reused for both shifts.
pub fn param_shift_jacobian<T, F>(
    circuit: &Circuit<T>,
    params: &[T],
    input: &Statevector<T>,
    slots: Range<usize>,
    shift: T,
    readout: F,
) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: Fn(&Statevector<T>) -> Vec<T> + Sync,
{
    circuit.check_run(params, input)?;
    if slots.end > circuit.num_params() {
        return Err(Error::ParamBinding(format!(
            "slots {slots:?} exceed {} parameters",
            circuit.num_params()
        )));
    }
    if let Some((idx, kind)) = circuit.first_unshiftable(slots.clone()) {
        return Err(Error::UnsupportedGate(format!(
            "gate {idx} ({kind:?}) is parametrized but is not a single-qubit rotation"
        )));
    }

    // (gate index, slot, state before the gate)
    let mut prefixes = Vec::new();
    let mut state = input.clone();
    let mut applied = 0;
    for (gate_idx, slot) in circuit.param_gates() {
        if !slots.contains(&slot) {
            continue;
        }
        while applied < gate_idx {
            state.apply(&circuit.gates()[applied], params)?;
            applied += 1;
        }
        prefixes.push((gate_idx, slot, state.clone()));
    }

    let halves: Vec<(usize, Vec<T>, Vec<T>)> = prefixes
        .par_iter()
        .map(|(gate_idx, slot, prefix)| {
            let eval = |delta: T| {
                let mut s = prefix.clone();
                circuit.apply_range_shifted(&mut s, params, *gate_idx, Some((*gate_idx, delta)));
                readout(&s)
            };
            (*slot, eval(shift), eval(-shift))
        })
        .collect();

    let mut out: Vec<Vec<T>> = vec![Vec::new(); slots.len()];
    for (slot, plus, minus) in halves {
        let row = &mut out[slot - slots.start];
        if row.is_empty() {
            *row = vec![T::zero(); plus.len()];
        }
        for ((r, p), m) in row.iter_mut().zip(&plus).zip(&minus) {
            *r += (*p - *m) * T::half();
        }
    }
    let width = match out.iter().map(Vec::len).max() {
        Some(w) if w > 0 => w,
        // no gate reads these slots; the readout width still has to match
        _ => {
            let mut s = input.clone();
            circuit.apply_to(&mut s, params)?;
            readout(&s).len()
        }
    };
    for row in &mut out {
        if row.is_empty() {
            *row = vec![T::zero(); width];
        }
    }
    Ok(out)
}

/// `∂⟨obs⟩/∂x_i` for circuit inputs encoded as rotation angles.
///
/// `circuit` reads the input angles from its first `angles.len()` parameter
/// slots and the trainable `params` from the remaining ones; it runs on `|0…0⟩`.
pub fn hybrid_input_grad<T: Real>(
    circuit: &Circuit<T>,
    obs: &Observable<T>,
    params: &[T],
    angles: &[T],
) -> Result<Vec<T>> {
    let full: Vec<T> = angles.iter().chain(params).copied().collect();
    let input = Statevector::new(circuit.num_qubits())?;
    if let Some(w) = obs.max_wire() {
        if w >= circuit.num_qubits() {
            return Err(Error::Shape(format!("observable wire {w} out of range")));
        }
    }
    let jac = param_shift_jacobian(
        circuit,
        &full,
        &input,
        0..angles.len(),
        standard_shift(),
        |s| vec![s.expectation(obs).unwrap_or_else(|_| T::zero())],
    )?;
    Ok(jac.into_iter().map(|row| row[0]).collect())
}
