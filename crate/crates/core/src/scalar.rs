//! Scalar abstraction shared by every solver in the crate.
//!
//! All numerical code is written against [`Real`], a bundle of `num-traits`
//! bounds satisfied by `f32` and `f64`. Tolerances in the public API are
//! chosen for `f64`; the `f32` instantiation is useful for quick sweeps and
//! for checking that nothing silently depends on double precision.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite doubles, which does not happen for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Signed power `|t|^(s-2) t`, the map written φ_s in the radial ODE.
#[inline]
pub fn signed_pow<T: Real>(t: T, s: T) -> T {
    if t == T::zero() {
        T::zero()
    } else {
        t.signum() * t.abs().powf(s - T::one())
    }
}

/// Sign as an integer in {-1, 0, 1}.
#[inline]
pub fn sign_of<T: Real>(t: T) -> i8 {
    if t > T::zero() {
        1
    } else if t < T::zero() {
        -1
    } else {
        0
    }
}
