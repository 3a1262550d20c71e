//! Scalar abstraction shared by the numeric kernels.
//!
//! Every kernel (normalization, correlation, k-means, the classifiers) is written
//! against [`Scalar`] so it runs on `f32` or `f64`. The data layer is `f64`
//! throughout; the concrete aliases at the crate root pin the kernels to `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Arithmetic mean; `None` on empty input.
pub fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let sum: T = values.iter().copied().sum();
    Some(sum / T::of_usize(values.len()))
}

/// Population variance (divides by `n`); `None` on empty input.
pub fn population_variance<T: Scalar>(values: &[T]) -> Option<T> {
    let m = mean(values)?;
    let ss: T = values.iter().map(|&v| (v - m) * (v - m)).sum();
    Some(ss / T::of_usize(values.len()))
}

pub fn population_std<T: Scalar>(values: &[T]) -> Option<T> {
    population_variance(values).map(Float::sqrt)
}
