//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qmllab::sim::{Angle, Gate, GateKind};

pub type Matrix = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn matvec(a: &Matrix, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Tensor product of per-qubit 2×2 factors; qubit 0 is the least significant
/// bit, so it is the rightmost factor.
pub fn on_qubits(n: usize, factors: &[(usize, Matrix)]) -> Matrix {
    let mut out = identity(1);
    for q in (0..n).rev() {
        let f = factors
            .iter()
            .find(|(w, _)| *w == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| identity(2));
        out = kron(&out, &f);
    }
    out
}

pub fn hadamard() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]
}

pub fn pauli_x() -> Matrix {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Matrix {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn rx(t: f64) -> Matrix {
    let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
    vec![vec![c(cs, 0.0), c(0.0, -sn)], vec![c(0.0, -sn), c(cs, 0.0)]]
}

pub fn ry(t: f64) -> Matrix {
    let (cs, sn) = ((t / 2.0).cos(), (t / 2.0).sin());
    vec![vec![c(cs, 0.0), c(-sn, 0.0)], vec![c(sn, 0.0), c(cs, 0.0)]]
}

pub fn rz(t: f64) -> Matrix {
    vec![
        vec![C::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), C::from_polar(1.0, t / 2.0)],
    ]
}

fn proj(bit: usize) -> Matrix {
    let mut m = vec![vec![c(0.0, 0.0); 2]; 2];
    m[bit][bit] = c(1.0, 0.0);
    m
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ U_t`.
pub fn controlled(n: usize, control: usize, target: usize, u: Matrix) -> Matrix {
    add(
        &on_qubits(n, &[(control, proj(0))]),
        &on_qubits(n, &[(control, proj(1)), (target, u)]),
    )
}

fn resolve(angle: Option<Angle<f64>>, params: &[f64]) -> f64 {
    match angle {
        Some(Angle::Fixed(t)) => t,
        Some(Angle::Ref(k)) => params[k],
        None => 0.0,
    }
}

/// Full `2^n × 2^n` unitary of one gate.
pub fn gate_matrix(n: usize, gate: &Gate<f64>, params: &[f64]) -> Matrix {
    let w = gate.wires();
    let t = resolve(gate.angle(), params);
    match gate.kind() {
        GateKind::H => on_qubits(n, &[(w[0], hadamard())]),
        GateKind::X => on_qubits(n, &[(w[0], pauli_x())]),
        GateKind::Z => on_qubits(n, &[(w[0], pauli_z())]),
        GateKind::RX => on_qubits(n, &[(w[0], rx(t))]),
        GateKind::RY => on_qubits(n, &[(w[0], ry(t))]),
        GateKind::RZ => on_qubits(n, &[(w[0], rz(t))]),
        GateKind::CNOT => controlled(n, w[0], w[1], pauli_x()),
        GateKind::CZ => controlled(n, w[0], w[1], pauli_z()),
        GateKind::CRZ => controlled(n, w[0], w[1], rz(t)),
    }
}

/// Product of all gate matrices, first gate rightmost.
pub fn circuit_unitary(n: usize, gates: &[Gate<f64>], params: &[f64]) -> Matrix {
    gates
        .iter()
        .fold(identity(1 << n), |acc, g| matmul(&gate_matrix(n, g, params), &acc))
}

pub fn basis_state(n: usize, index: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[index] = c(1.0, 0.0);
    v
}

/// Seeded random circuit on 1..=max_qubits qubits with up to `max_gates`
/// gates, mixing fixed and referenced angles. Returns it with its params.
pub fn random_circuit<R: rand::Rng>(
    rng: &mut R,
    max_qubits: usize,
    max_gates: usize,
) -> (qmllab::Circuit, Vec<f64>) {
    use std::f64::consts::PI;
    let n = rng.gen_range(1..=max_qubits);
    let num_params = rng.gen_range(1..=4);
    let params: Vec<f64> = (0..num_params).map(|_| rng.gen_range(-PI..PI)).collect();
    let mut circuit = qmllab::Circuit::new(n, num_params).unwrap();
    let gates = rng.gen_range(1..=max_gates);
    for _ in 0..gates {
        let angle = if rng.gen_bool(0.5) {
            Angle::Ref(rng.gen_range(0..num_params))
        } else {
            Angle::Fixed(rng.gen_range(-PI..PI))
        };
        let q = rng.gen_range(0..n);
        let pick = if n == 1 { rng.gen_range(0..6) } else { rng.gen_range(0..9) };
        let other = if n > 1 {
            (q + rng.gen_range(1..n)) % n
        } else {
            q
        };
        let gate = match pick {
            0 => Gate::h(q),
            1 => Gate::x(q),
            2 => Gate::z(q),
            3 => Gate::rx(q, angle),
            4 => Gate::ry(q, angle),
            5 => Gate::rz(q, angle),
            6 => Gate::cnot(q, other),
            7 => Gate::cz(q, other),
            _ => Gate::crz(q, other, angle),
        };
        circuit.push(gate).unwrap();
    }
    (circuit, params)
}
