//! Scalar abstraction: the whole library is generic over the real field.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar backing every coefficient: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert into the scalar type")
    }

    /// Exact conversion from a lattice integer.
    fn of_int(n: i64) -> Self {
        Self::from_i64(n).expect("lattice integer must convert into the scalar type")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
}

/// Complex number over the library scalar.
pub type C<T> = Complex<T>;

/// Default magnitude below which stored coefficients are dropped.
pub fn default_prune_eps<T: Real>() -> T {
    T::of(1e-14)
}

/// `i` as a complex scalar.
pub fn imag_unit<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}
