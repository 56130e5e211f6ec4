//! Scalar bounds for the exact and floating-point routes.
//!
//! Every exact computation in this crate is written once against
//! [`Natural`] (unsigned integers: `u64`, `u128`, `BigUint`, ...). Values on
//! the unit interval never need a sign, so the whole crate works over the
//! naturals and the non-negative rationals built from them.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigInt, BigUint, ToBigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive, Unsigned};

/// Unsigned integer usable as the numerator/denominator type.
///
/// Fixed-width instantiations wrap or panic on overflow exactly like the
/// underlying primitive; use `BigUint` whenever denominators are unbounded.
pub trait Natural:
    Integer
    + Unsigned
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + ToBigUint
    + Send
    + Sync
    + 'static
{
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize value does not fit the scalar type")
    }

    fn from_u64_exact(n: u64) -> Self {
        Self::from_u64(n).expect("u64 value does not fit the scalar type")
    }

    fn to_big(&self) -> BigUint {
        self.to_biguint().expect("unsigned values always convert")
    }
}

impl<T> Natural for T where
    T: Integer
        + Unsigned
        + Clone
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + ToBigUint
        + Send
        + Sync
        + 'static
{
}

/// Floating-point type for the real-valued extension (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Lifts a non-negative rational into signed arbitrary precision.
pub fn to_signed<T: Natural>(x: &Ratio<T>) -> Ratio<BigInt> {
    Ratio::new_raw(BigInt::from(x.numer().to_big()), BigInt::from(x.denom().to_big()))
}

/// Correctly rounded `f64` approximation of an exact rational.
pub fn to_f64<T: Natural>(x: &Ratio<T>) -> f64 {
    to_signed(x).to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn ratio_string<T: Natural>(x: &Ratio<T>) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
