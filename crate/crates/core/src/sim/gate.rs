use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    /// Controlled RZ. Simulated like any other gate, but its generator has
    /// two distinct eigenvalue gaps, so the two-term shift rule rejects it.
    CRZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::CRZ => 2,
            _ => 1,
        }
    }

    pub fn is_parametrized(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRZ
        )
    }

    /// Single-qubit Pauli rotation: the only kind the `π/2` shift rule is exact for.
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }
}

/// Source of a gate's rotation angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle<T> {
    Fixed(T),
    /// Index into the parameter vector supplied at run time.
    Ref(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T> {
    kind: GateKind,
    wires: Vec<usize>,
    angle: Option<Angle<T>>,
}

impl<T: Real> Gate<T> {
    pub fn h(q: usize) -> Self {
        Self::fixed_kind(GateKind::H, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::fixed_kind(GateKind::X, vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::fixed_kind(GateKind::Z, vec![q])
    }

    pub fn rx(q: usize, angle: Angle<T>) -> Self {
        Self::rotation(GateKind::RX, vec![q], angle)
    }

    pub fn ry(q: usize, angle: Angle<T>) -> Self {
        Self::rotation(GateKind::RY, vec![q], angle)
    }

    pub fn rz(q: usize, angle: Angle<T>) -> Self {
        Self::rotation(GateKind::RZ, vec![q], angle)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed_kind(GateKind::CNOT, vec![control, target])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::fixed_kind(GateKind::CZ, vec![a, b])
    }

    pub fn crz(control: usize, target: usize, angle: Angle<T>) -> Self {
        Self::rotation(GateKind::CRZ, vec![control, target], angle)
    }

    fn fixed_kind(kind: GateKind, wires: Vec<usize>) -> Self {
        Gate {
            kind,
            wires,
            angle: None,
        }
    }

    fn rotation(kind: GateKind, wires: Vec<usize>, angle: Angle<T>) -> Self {
        Gate {
            kind,
            wires,
            angle: Some(angle),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn angle(&self) -> Option<Angle<T>> {
        self.angle
    }

    pub fn param_ref(&self) -> Option<usize> {
        match self.angle {
            Some(Angle::Ref(k)) => Some(k),
            _ => None,
        }
    }

    pub(crate) fn with_offset_ref(&self, offset: usize) -> Self {
        let mut g = self.clone();
        if let Some(Angle::Ref(k)) = g.angle {
            g.angle = Some(Angle::Ref(k + offset));
        }
        g
    }

    /// Inverse gate (used for unitarity checks). `Ref` angles become fixed
    /// negated values resolved against `params`.
    pub fn inverse(&self, params: &[T]) -> Option<Self> {
        let mut g = self.clone();
        if let Some(angle) = self.angle {
            let theta = match angle {
                Angle::Fixed(v) => v,
                Angle::Ref(k) => *params.get(k)?,
            };
            g.angle = Some(Angle::Fixed(-theta));
        }
        Some(g)
    }
}

pub(crate) type Matrix2<T> = [[Complex<T>; 2]; 2];

/// 2×2 unitary for single-qubit kinds, given the resolved angle.
pub(crate) fn single_qubit_matrix<T: Real>(kind: GateKind, theta: T) -> Matrix2<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let half = theta * T::half();
    let (s, c) = half.sin_cos();
    match kind {
        GateKind::H => {
            let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
            [[r, r], [r, -r]]
        }
        GateKind::X => [[zero, one], [one, zero]],
        GateKind::Z => [[one, zero], [zero, -one]],
        GateKind::RX => {
            let d = Complex::new(c, T::zero());
            let o = Complex::new(T::zero(), -s);
            [[d, o], [o, d]]
        }
        GateKind::RY => [
            [Complex::new(c, T::zero()), Complex::new(-s, T::zero())],
            [Complex::new(s, T::zero()), Complex::new(c, T::zero())],
        ],
        GateKind::RZ => [[Complex::new(c, -s), zero], [zero, Complex::new(c, s)]],
        GateKind::CNOT | GateKind::CZ | GateKind::CRZ => {
            unreachable!("two-qubit gate has no 2x2 matrix")
        }
    }
}
