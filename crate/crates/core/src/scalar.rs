//! Scalar abstraction for the simulator and gradient code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar usable by the simulation core: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    fn half() -> Self;

    /// Lossy conversion from `f64` literals.
    fn lit(value: f64) -> Self;
}

impl Real for f32 {
    fn half() -> Self {
        0.5
    }

    fn lit(value: f64) -> Self {
        value as f32
    }
}

impl Real for f64 {
    fn half() -> Self {
        0.5
    }

    fn lit(value: f64) -> Self {
        value
    }
}
