//! Gradient machinery: parameter-shift for circuits, reverse-mode for dense
//! layers, and central finite differences as an independent check.

mod dense;
mod finite_diff;
mod shift;

pub use dense::{dense_backward, dense_forward, Activation, DenseGrads, DenseLayer, GradTape};
pub use finite_diff::{central_difference, finite_diff_grad, GradientComparison, REL_FLOOR};
pub use shift::{
    hybrid_input_grad, param_shift_grad, param_shift_grad_with, param_shift_jacobian,
    standard_shift,
};
