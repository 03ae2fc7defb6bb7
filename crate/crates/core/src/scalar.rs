//! Scalar abstractions.
//!
//! Two tiers are used. [`Real`] is the floating-point type the solvers run
//! on (`f32` or `f64`). [`CoefScalar`] is the weaker field-like bound needed
//! to evaluate the closed-form coefficient formulas, which also admits exact
//! rational types so polynomial identities can be checked without rounding.

use std::fmt::{Debug, Display};

use num_traits::{FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Floating-point scalar used by grids and solvers.
pub trait Real:
    num_traits::Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Converts this value to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar type accepted by the coefficient formulas: any ordered field with
/// conversions from small integers (floats and exact rationals alike).
pub trait CoefScalar:
    Copy + PartialOrd + Debug + Num + Signed + FromPrimitive + ToPrimitive
{
    /// The integer `v` as a scalar.
    fn int(v: i64) -> Self {
        Self::from_i64(v).expect("small integers are representable")
    }

    /// The fraction `num/den` as a scalar.
    fn frac(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// `self` raised to a small non-negative integer power.
    fn powi_exact(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * *self)
    }

    /// Lossy conversion for reporting.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> CoefScalar for T where
    T: Copy + PartialOrd + Debug + Num + Signed + FromPrimitive + ToPrimitive
{
}
