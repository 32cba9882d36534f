//! Hybrid quantum/classical learning laboratory.
//!
//! * [`sim`]: dense statevector simulator for parametrized circuits.
//! * [`gradients`]: parameter-shift, dense-layer backprop and finite differences.
//! * [`models`]: quantum MLP, quantum forward-forward, quantum backprop
//!   classifier, a frozen-circuit baseline and classical references.
//! * [`training`], [`data`]: losses, optimizers, the epoch loop and the digits pipeline.
//! * [`search`]: evolutionary search over model specifications, with an
//!   optional remote generator.
//!
//! The simulator and gradient code are generic over [`Real`] (`f32`/`f64`);
//! models and training use `f64` through the aliases below.

pub mod data;
pub mod error;
pub mod gradients;
pub mod models;
pub mod scalar;
pub mod search;
pub mod sim;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Statevector = sim::Statevector<f64>;
pub type Circuit = sim::Circuit<f64>;
pub type Gate = sim::Gate<f64>;
pub type Angle = sim::Angle<f64>;
pub type Observable = sim::Observable<f64>;
pub type DenseLayer = gradients::DenseLayer<f64>;
pub type GradTape = gradients::GradTape<f64>;
