use std::collections::BTreeMap;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `coefficient · ⊗_q P_q`, identity on unlisted qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    coefficient: T,
    paulis: BTreeMap<usize, Pauli>,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(coefficient: T, paulis: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        PauliTerm {
            coefficient,
            paulis: paulis.into_iter().collect(),
        }
    }

    pub fn coefficient(&self) -> T {
        self.coefficient
    }

    pub fn paulis(&self) -> &BTreeMap<usize, Pauli> {
        &self.paulis
    }
}

/// Real linear combination of Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T> {
    terms: Vec<PauliTerm<T>>,
}

impl<T: Real> Observable<T> {
    pub fn new(terms: Vec<PauliTerm<T>>) -> Self {
        Observable { terms }
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        Observable::new(vec![PauliTerm::new(T::one(), [(q, p)])])
    }

    pub fn z(q: usize) -> Self {
        Self::single(q, Pauli::Z)
    }

    pub fn zz(a: usize, b: usize) -> Self {
        Observable::new(vec![PauliTerm::new(T::one(), [(a, Pauli::Z), (b, Pauli::Z)])])
    }

    pub fn terms(&self) -> &[PauliTerm<T>] {
        &self.terms
    }

    pub fn scaled(&self, c: T) -> Self {
        Observable {
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coefficient: t.coefficient * c,
                    paulis: t.paulis.clone(),
                })
                .collect(),
        }
    }

    pub fn max_wire(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter_map(|t| t.paulis.keys().next_back().copied())
            .max()
    }
}
