//! Real scalar bound shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the linear algebra and entropy code is generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are written as `f64` literals
/// and mapped through [`Real::tol`], which floors them at a small multiple of
/// the type's machine epsilon so the same code path stays meaningful in
/// single precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// A tolerance of `x`, but never tighter than `256 * epsilon`.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::c(256.0);
        Self::c(x).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// `-x log2 x` with the `0 log 0 = 0` convention.
    #[inline]
    fn eta(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            -self * self.log2()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
