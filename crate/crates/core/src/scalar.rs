//! Scalar abstraction for objective values.
//!
//! Everything that touches objective values (oracles, thresholds, traces and
//! the charging verifier) is generic over [`Scalar`], which is implemented
//! for `f32` and `f64`. Thresholds are irrational multiples of `W`, so there
//! is no exact/rational instantiation.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal, panicking only if the type cannot hold it at all.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion")
    }

    /// Relative slack used by the verifiers when comparing sums of weights.
    fn verify_tolerance() -> Self {
        Self::epsilon().sqrt()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `a <= b` up to the verifier tolerance, scaled by the magnitude of the operands.
pub fn approx_le<T: Scalar>(a: T, b: T) -> bool {
    a <= b + T::verify_tolerance() * (T::one() + a.abs() + b.abs())
}

pub fn approx_eq<T: Scalar>(a: T, b: T) -> bool {
    approx_le(a, b) && approx_le(b, a)
}
