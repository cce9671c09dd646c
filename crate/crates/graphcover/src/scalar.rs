//! Floating-point scalar abstraction shared by every numeric routine.

use num_traits::{Float, FromPrimitive, NumAssign, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar used for features, distances and network weights.
pub trait Scalar:
    Float
    + FromPrimitive
    + NumAssign
    + Signed
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Sum
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Pivot and feasibility tolerance for iterative solvers.
    fn tolerance() -> Self;

    /// Converts an `f64` constant, rounding if needed.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Bit pattern used for exact hashing; `-0` and `+0` share a key.
    fn key_bits(self) -> u64;
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }
    fn key_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }
    fn key_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            u64::from(self.to_bits())
        }
    }
}

/// Euclidean distance between two equal-length vectors.
pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum::<T>().sqrt()
}
