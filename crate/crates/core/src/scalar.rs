//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the numerical kernels are generic over.
///
/// Implemented for `f32` and `f64`. The accuracy targets quoted throughout the
/// crate refer to `f64`; `f32` instantiations run the same algorithms with
/// tolerances scaled to the type's epsilon.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline(always)]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline(always)]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance that is `target` in `f64` but never tighter than a few hundred
/// ulps of `T`.
#[inline]
pub(crate) fn tol<T: Real>(target: f64) -> T {
    let floor = T::epsilon() * lit(256.0);
    let t: T = lit(target);
    if t < floor {
        floor
    } else {
        t
    }
}
