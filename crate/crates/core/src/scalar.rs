//! Scalar abstractions shared by the exact and floating point code paths.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element: `f32`, `f64` or an exact rational.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Lossy conversion used at API boundaries (JSON, reports).
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self * count` without requiring a multiplication by a converted integer
    /// at every call site.
    fn times(&self, count: usize) -> Self {
        self.clone() * Self::from_usize(count).expect("multiplicity fits in scalar")
    }
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Floating point scalar for the transcendental closed forms (`f32`/`f64`).
pub trait RealScalar: Scalar + Float {}

impl<T: Scalar + Float> RealScalar for T {}

/// Converts an `f64` literal into any real scalar.
pub(crate) fn lit<F: RealScalar>(x: f64) -> F {
    F::from_f64(x).expect("literal representable")
}
