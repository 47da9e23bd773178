//! Scalar abstraction for the statistic kernels.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the statistic kernels are generic over.
///
/// Implemented for `f32` and `f64`. The simulation pipeline itself runs in
/// `f64`; the kernels accept either so callers holding `f32` buffers can use
/// them directly.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    /// Conversion from a count or index.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable in every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest distance from 0 and 1 that PIT values are clamped to before
    /// taking logarithms.
    fn log_clamp() -> Self;
}

impl Scalar for f64 {
    fn log_clamp() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    // 1e-12 rounds to 1.0 when subtracted from 1.0 in f32.
    fn log_clamp() -> Self {
        1e-7
    }
}

/// Clamp a PIT value into `[eps, 1 - eps]`.
#[inline]
pub fn clamp_unit<T: Scalar>(y: T) -> T {
    let eps = T::log_clamp();
    y.max(eps).min(T::one() - eps)
}
