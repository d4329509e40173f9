use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate: `f32` or `f64`.
///
/// The two tolerances are precision dependent. `dedup_tol` merges coincident
/// refinement points, `verify_tol` is the slack allowed when re-checking a
/// certified distance or a zero-freeness claim.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    fn dedup_tol() -> Self;
    fn verify_tol() -> Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Scalar for f64 {
    fn dedup_tol() -> Self {
        1e-12
    }
    fn verify_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn dedup_tol() -> Self {
        1e-6
    }
    fn verify_tol() -> Self {
        1e-4
    }
}

/// Linear interpolation `a + t (b - a)`. Every PL evaluation goes through here
/// so that equal endpoint values reproduce exactly.
#[inline]
pub fn lerp<S: Scalar>(a: S, b: S, t: S) -> S {
    if a == b {
        a
    } else {
        a + t * (b - a)
    }
}
