//! Scalar abstraction for the numeric core.
//!
//! Everything downstream of the combinatorics is generic over a real scalar
//! type; `f32` and `f64` both qualify. The CLI and the verification suites
//! instantiate `f64`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar used throughout the linear algebra.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {}

impl<T> Scalar for T where T: RealField + FromPrimitive + ToPrimitive + Copy {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Scalar>(value: f64) -> T {
    nalgebra::convert(value)
}

/// Lossy view of a scalar as `f64`, for reports and error messages.
#[inline]
pub fn as_f64<T: Scalar>(value: T) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
