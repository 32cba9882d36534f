use num_complex::Complex;

use super::gate::{single_qubit_matrix, Angle, Gate, GateKind, Matrix2};
use super::observable::{Observable, Pauli};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_QUBITS: usize = 14;

/// Complex amplitudes over `num_qubits` qubits, little-endian basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> Statevector<T> {
    /// `|0…0⟩`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps caller-provided amplitudes; the vector must be normalized.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_qubits(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::Shape(format!(
                "{} amplitudes for {} qubits (expected {})",
                amplitudes.len(),
                num_qubits,
                1usize << num_qubits
            )));
        }
        let state = Statevector {
            num_qubits,
            amplitudes,
        };
        let tol = T::epsilon().sqrt() * T::lit(16.0);
        if (state.norm_sqr() - T::one()).abs() > tol {
            return Err(Error::Validation(format!(
                "state is not normalized: norm² = {}",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// Applies `gate`, resolving a `Ref` angle against `params`.
    pub fn apply(&mut self, gate: &Gate<T>, params: &[T]) -> Result<()> {
        self.check_wires(gate.wires())?;
        let theta = match gate.angle() {
            None => T::zero(),
            Some(Angle::Fixed(v)) => v,
            Some(Angle::Ref(k)) => *params.get(k).ok_or_else(|| {
                Error::ParamBinding(format!(
                    "{:?} references parameter {k} but only {} supplied",
                    gate.kind(),
                    params.len()
                ))
            })?,
        };
        self.apply_resolved(gate, theta);
        Ok(())
    }

    /// Applies `gate` with an already-resolved angle. Wires must be checked.
    pub(crate) fn apply_resolved(&mut self, gate: &Gate<T>, theta: T) {
        let w = gate.wires();
        match gate.kind() {
            GateKind::CNOT => self.apply_cnot(w[0], w[1]),
            GateKind::CZ => self.apply_cz(w[0], w[1]),
            GateKind::CRZ => self.apply_crz(w[0], w[1], theta),
            GateKind::X => self.apply_x(w[0]),
            GateKind::Z => self.apply_z(w[0]),
            kind => self.apply_single(w[0], &single_qubit_matrix(kind, theta)),
        }
    }

    pub(crate) fn check_wires(&self, wires: &[usize]) -> Result<()> {
        if let Some(&bad) = wires.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::Shape(format!(
                "wire {bad} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn apply_single(&mut self, q: usize, m: &Matrix2<T>) {
        let stride = 1usize << q;
        for block in (0..self.amplitudes.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + stride];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_x(&mut self, q: usize) {
        let stride = 1usize << q;
        for block in (0..self.amplitudes.len()).step_by(stride << 1) {
            for i in block..block + stride {
                self.amplitudes.swap(i, i + stride);
            }
        }
    }

    fn apply_z(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = 1usize << control;
        let t = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_crz(&mut self, control: usize, target: usize, theta: T) {
        let c = 1usize << control;
        let t = 1usize << target;
        let (s, co) = (theta * T::half()).sin_cos();
        let lower = Complex::new(co, -s);
        let upper = Complex::new(co, s);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & c != 0 {
                *amp = *amp * if i & t == 0 { lower } else { upper };
            }
        }
    }

    /// Applies a Pauli string in place (no angle, no normalization change).
    fn apply_pauli(&mut self, q: usize, p: Pauli) {
        match p {
            Pauli::X => self.apply_x(q),
            Pauli::Z => self.apply_z(q),
            Pauli::Y => {
                // Y = [[0, -i], [i, 0]]
                let stride = 1usize << q;
                let i_unit = Complex::new(T::zero(), T::one());
                for block in (0..self.amplitudes.len()).step_by(stride << 1) {
                    for i in block..block + stride {
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[i + stride];
                        self.amplitudes[i] = -i_unit * a1;
                        self.amplitudes[i + stride] = i_unit * a0;
                    }
                }
            }
        }
    }

    /// `Σ_terms c · ⟨ψ|P|ψ⟩`; the imaginary residue is discarded.
    pub fn expectation(&self, obs: &Observable<T>) -> Result<T> {
        if let Some(w) = obs.max_wire() {
            if w >= self.num_qubits {
                return Err(Error::Shape(format!(
                    "observable acts on wire {w} but the state has {} qubits",
                    self.num_qubits
                )));
            }
        }
        let mut total = T::zero();
        let mut scratch = self.clone();
        for term in obs.terms() {
            scratch.amplitudes.copy_from_slice(&self.amplitudes);
            for (&q, &p) in term.paulis() {
                scratch.apply_pauli(q, p);
            }
            total += term.coefficient() * self.inner(&scratch).re;
        }
        Ok(total)
    }

    /// Per-qubit `⟨Z_q⟩` for every qubit, computed from probabilities.
    pub fn z_expectations(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.num_qubits];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, z) in out.iter_mut().enumerate() {
                if i >> q & 1 == 0 {
                    *z += p;
                } else {
                    *z -= p;
                }
            }
        }
        out
    }
}

fn check_qubits(num_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&num_qubits) {
        return Err(Error::config(
            "num_qubits",
            format!("{num_qubits} outside 1..={MAX_QUBITS}"),
        ));
    }
    Ok(())
}
