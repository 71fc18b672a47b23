//! Floating-point abstraction shared by every model.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Scalar type the models are generic over; implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Sum
    + DeserializeOwned
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, e.g. `T::lit(0.833)`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to every Float")
    }

    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count converts to every Float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Giga prefix used by GFLOP/s and GB/s table values.
    #[inline]
    fn giga() -> Self {
        Self::lit(1e9)
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Sum
        + DeserializeOwned
        + Serialize
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(lit::<f64>(0.833), 0.833);
        assert_eq!(lit::<f32>(0.5), 0.5f32);
        assert_eq!(f64::from_count(1661440), 1661440.0);
        assert_eq!(f32::giga().as_f64(), 1e9);
    }
}
