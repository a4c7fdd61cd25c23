//! Floating-point scalar abstraction: all of the model arithmetic is generic
//! over `Scalar` so the same code runs in `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal or config value.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 -> Scalar conversion")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Scalar -> f64 conversion")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }

    /// log base 2, the rate unit used throughout.
    fn log2_(self) -> Self {
        self.log2()
    }

    /// 2^x, the inverse of [`Scalar::log2_`].
    fn exp2_(self) -> Self {
        self.exp2()
    }

    fn ln2() -> Self {
        Self::of(std::f64::consts::LN_2)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand used in generic code for converting constants.
#[inline]
pub fn s<S: Scalar>(x: f64) -> S {
    S::of(x)
}

/// dBm to linear watts. Unit conversions live at the config boundary; all
/// internal arithmetic is in watts / Hz / bits-per-second.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Linear watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// dB value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
