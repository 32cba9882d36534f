use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sim::{run, Circuit, Observable, Statevector};

/// Central difference `[E(θ_k+ε) − E(θ_k−ε)] / 2ε` per parameter, via plain runs.
pub fn finite_diff_grad<T: Real>(
    circuit: &Circuit<T>,
    obs: &Observable<T>,
    params: &[T],
    input: &Statevector<T>,
    epsilon: T,
) -> Result<Vec<T>> {
    let energy = |p: &[T]| -> Result<T> { run(circuit, p, input)?.expectation(obs) };
    energy(params)?;
    central_difference(|p| energy(p), params, epsilon)
}

/// Central difference of an arbitrary scalar function.
pub fn central_difference<T, F>(f: F, x: &[T], epsilon: T) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(&[T]) -> Result<T>,
{
    if !(epsilon > T::zero()) {
        return Err(Error::config("epsilon", format!("{epsilon} is not positive")));
    }
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        probe[k] = x[k] + epsilon;
        let plus = f(&probe)?;
        probe[k] = x[k] - epsilon;
        let minus = f(&probe)?;
        probe[k] = x[k];
        out.push((plus - minus) / (epsilon + epsilon));
    }
    Ok(out)
}

/// Components smaller than this in both vectors are left out of `max_rel`.
pub const REL_FLOOR: f64 = 1e-6;

/// Worst-case deviation between two gradient vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientComparison {
    pub count: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    /// Index of the component with the largest absolute deviation.
    pub worst_index: Option<usize>,
}

impl GradientComparison {
    pub fn new(analytic: &[f64], numeric: &[f64]) -> Self {
        let mut cmp = GradientComparison {
            count: analytic.len(),
            max_abs: 0.0,
            max_rel: 0.0,
            worst_index: None,
        };
        for (i, (a, n)) in analytic.iter().zip(numeric).enumerate() {
            let abs = (a - n).abs();
            let scale = a.abs().max(n.abs());
            if abs > cmp.max_abs || cmp.worst_index.is_none() {
                cmp.max_abs = abs.max(cmp.max_abs);
                cmp.worst_index = Some(i);
            }
            if scale > REL_FLOOR {
                cmp.max_rel = cmp.max_rel.max(abs / scale);
            }
        }
        cmp
    }
}
