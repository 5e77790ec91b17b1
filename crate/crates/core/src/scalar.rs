//! Scalar abstraction shared by the generic numerics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar used by the probability, entropy and DFT code.
///
/// Implemented for `f32` and `f64`. Everything that has to survive
/// `r_max^{2N}` style underflow should run in `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Debug + Display + Default + serde::Serialize
{
    /// Convert an `f64` constant into this scalar.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon in this precision.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Long-vector summation threshold above which pairwise summation is used.
pub(crate) const PAIRWISE_THRESHOLD: usize = 1000;

/// Sum a slice, pairwise for long inputs.
pub fn sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= PAIRWISE_THRESHOLD {
        xs.iter().copied().sum()
    } else {
        pairwise(xs)
    }
}

fn pairwise<T: Real>(xs: &[T]) -> T {
    if xs.len() <= 64 {
        return xs.iter().copied().sum();
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

/// Sum the results of `f` applied to each element, pairwise for long inputs.
pub fn sum_map<T: Real, F: Fn(T) -> T>(xs: &[T], f: F) -> T {
    if xs.len() <= PAIRWISE_THRESHOLD {
        xs.iter().map(|&x| f(x)).sum()
    } else {
        let mapped: Vec<T> = xs.iter().map(|&x| f(x)).collect();
        pairwise(&mapped)
    }
}
