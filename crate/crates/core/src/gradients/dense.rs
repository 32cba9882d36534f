use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Tanh,
    Identity,
}

impl Activation {
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::ReLU => z.max(T::zero()),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative at pre-activation `z`; ReLU'(0) = 0.
    fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::ReLU => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                T::one() - t * t
            }
            Activation::Identity => T::one(),
        }
    }
}

/// Fully connected layer `activation(W·x + b)`; `W` is row-major `out × in`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer<T> {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<T>,
    bias: Vec<T>,
    activation: Activation,
}

impl<T: Real> DenseLayer<T> {
    pub fn new(
        out_dim: usize,
        in_dim: usize,
        weights: Vec<T>,
        bias: Vec<T>,
        activation: Activation,
    ) -> Result<Self> {
        if weights.len() != out_dim * in_dim || bias.len() != out_dim {
            return Err(Error::Shape(format!(
                "dense layer {out_dim}x{in_dim} got {} weights and {} biases",
                weights.len(),
                bias.len()
            )));
        }
        Ok(DenseLayer {
            in_dim,
            out_dim,
            weights,
            bias,
            activation,
        })
    }

    /// Weights uniform on `±1/√in`, zero bias.
    pub fn init<R: Rng + ?Sized>(
        out_dim: usize,
        in_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (in_dim.max(1) as f64).sqrt();
        let weights = (0..out_dim * in_dim)
            .map(|_| T::lit(rng.gen_range(-bound..=bound)))
            .collect();
        DenseLayer {
            in_dim,
            out_dim,
            weights,
            bias: vec![T::zero(); out_dim],
            activation,
        }
    }

    pub fn zeros(out_dim: usize, in_dim: usize, activation: Activation) -> Self {
        DenseLayer {
            in_dim,
            out_dim,
            weights: vec![T::zero(); out_dim * in_dim],
            bias: vec![T::zero(); out_dim],
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// Weights (row-major) then bias.
    pub fn params(&self) -> impl Iterator<Item = T> + '_ {
        self.weights.iter().chain(&self.bias).copied()
    }

    /// Loads `num_params()` values from the front of `values`; returns the rest.
    pub fn load_params<'a>(&mut self, values: &'a [T]) -> Result<&'a [T]> {
        let n = self.num_params();
        if values.len() < n {
            return Err(Error::Shape(format!(
                "need {n} parameters, {} left",
                values.len()
            )));
        }
        let (w, rest) = values.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        let (b, rest) = rest.split_at(self.bias.len());
        self.bias.copy_from_slice(b);
        Ok(rest)
    }

    /// Forward pass without recording.
    pub fn forward(&self, input: &[T]) -> Result<Vec<T>> {
        let pre = self.pre_activation(input)?;
        Ok(pre.into_iter().map(|z| self.activation.apply(z)).collect())
    }

    fn pre_activation(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.in_dim {
            return Err(Error::Shape(format!(
                "dense layer expects {} inputs, got {}",
                self.in_dim,
                input.len()
            )));
        }
        Ok(self
            .weights
            .chunks_exact(self.in_dim.max(1))
            .take(self.out_dim)
            .zip(&self.bias)
            .map(|(row, &b)| {
                row.iter()
                    .zip(input)
                    .fold(b, |acc, (&w, &x)| acc + w * x)
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct TapeRecord<T> {
    input: Vec<T>,
    pre_activation: Vec<T>,
}

/// Per-layer inputs and pre-activations recorded by [`dense_forward`],
/// consumed last-in first-out by [`dense_backward`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradTape<T> {
    records: Vec<TapeRecord<T>>,
}

impl<T: Real> GradTape<T> {
    pub fn new() -> Self {
        GradTape {
            records: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.records.len()
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseGrads<T> {
    /// Row-major, same layout as the layer's weights.
    pub weight_grad: Vec<T>,
    pub bias_grad: Vec<T>,
    pub input_grad: Vec<T>,
}

pub fn dense_forward<T: Real>(
    layer: &DenseLayer<T>,
    input: &[T],
    tape: &mut GradTape<T>,
) -> Result<Vec<T>> {
    let pre = layer.pre_activation(input)?;
    let out = pre.iter().map(|&z| layer.activation.apply(z)).collect();
    tape.records.push(TapeRecord {
        input: input.to_vec(),
        pre_activation: pre,
    });
    Ok(out)
}

pub fn dense_backward<T: Real>(
    layer: &DenseLayer<T>,
    upstream: &[T],
    tape: &mut GradTape<T>,
) -> Result<DenseGrads<T>> {
    let record = tape
        .records
        .pop()
        .ok_or_else(|| Error::State("gradient tape is empty".into()))?;
    if record.input.len() != layer.in_dim || record.pre_activation.len() != layer.out_dim {
        return Err(Error::State(format!(
            "tape record {}->{} does not match layer {}->{}",
            record.input.len(),
            record.pre_activation.len(),
            layer.in_dim,
            layer.out_dim
        )));
    }
    if upstream.len() != layer.out_dim {
        return Err(Error::Shape(format!(
            "upstream has {} entries for {} outputs",
            upstream.len(),
            layer.out_dim
        )));
    }
    let delta: Vec<T> = upstream
        .iter()
        .zip(&record.pre_activation)
        .map(|(&u, &z)| u * layer.activation.derivative(z))
        .collect();
    let mut weight_grad = Vec::with_capacity(layer.weights.len());
    for &d in &delta {
        weight_grad.extend(record.input.iter().map(|&x| d * x));
    }
    let mut input_grad = vec![T::zero(); layer.in_dim];
    for (row, &d) in layer.weights.chunks_exact(layer.in_dim.max(1)).zip(&delta) {
        for (g, &w) in input_grad.iter_mut().zip(row) {
            *g += d * w;
        }
    }
    Ok(DenseGrads {
        weight_grad,
        bias_grad: delta,
        input_grad,
    })
}
