//! Scalar abstraction shared by every numeric kernel.
//!
//! Models, metrics and the linear solver are written once against [`Real`]
//! and instantiated for `f64` (the default used by the pipeline) or `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("real converts to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + Serialize
        + DeserializeOwned
        + 'static
{
}

pub(crate) fn mean<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let n = T::from_count(xs.len());
    let m = xs.iter().copied().sum::<T>() / n;
    // one refinement pass; makes the mean of a constant sequence exact
    m + xs.iter().map(|&x| x - m).sum::<T>() / n
}

/// Population standard deviation (divides by n), two-pass.
pub(crate) fn population_sd<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let m = mean(xs);
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / T::from_count(xs.len())).sqrt()
}

/// Median; the mean of the two middle values for even lengths.
pub(crate) fn median<T: Real>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let mut v = xs.to_vec();
    let mid = v.len() / 2;
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("finite values");
    let (_, upper, _) = v.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if v.len() % 2 == 1 {
        upper
    } else {
        let lower = v[..mid]
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max);
        (lower + upper) / T::lit(2.0)
    }
}
