//! Dense complex matrix exponential by scaling-and-squaring.
//!
//! The argument is halved until its 1-norm is ≤ ½, the exponential of the
//! scaled matrix is summed as a Taylor series until the next term's norm
//! falls below the requested tolerance, and the result is squared back. The
//! evolution code always passes skew-Hermitian arguments (−i × Hermitian
//! generator), for which the scheme is norm-preserving to the tolerance; the
//! default tolerance is 1e-12.

use crate::scalar::{Real, C};
use ndarray::Array2;

/// Default truncation tolerance of the scaled Taylor series.
pub fn default_tol<T: Real>() -> T {
    T::of(1e-12)
}

/// Max absolute column sum.
pub fn one_norm<T: Real>(a: &Array2<C<T>>) -> T {
    let mut best = T::zero();
    for col in a.columns() {
        let s = col.iter().fold(T::zero(), |acc, x| acc + x.norm());
        best = best.max(s);
    }
    best
}

/// Entrywise 2-norm; used as the deviation metric between evolution
/// operators (an upper bound on the spectral norm).
pub fn frobenius_norm<T: Real>(a: &Array2<C<T>>) -> T {
    a.iter()
        .fold(T::zero(), |acc, x| acc + x.norm_sqr())
        .sqrt()
}

/// exp(a) for a square complex matrix.
pub fn expm<T: Real>(a: &Array2<C<T>>, tol: T) -> Array2<C<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix exponential needs a square matrix");
    if n == 0 {
        return a.clone();
    }

    let half = T::of(0.5);
    let norm = one_norm(a);
    let squarings: u32 = if norm > half {
        (norm / half).log2().ceil().to_u32().unwrap_or(0).max(1)
    } else {
        0
    };
    let scale = T::of(2.0).powi(squarings as i32);
    let scaled = a.mapv(|x| x / C::new(scale, T::zero()));

    let mut sum: Array2<C<T>> = Array2::eye(n);
    let mut term: Array2<C<T>> = Array2::eye(n);
    for k in 1..=64u32 {
        let inv_k = C::new(T::one() / T::of(k as f64), T::zero());
        term = term.dot(&scaled).mapv(|x| x * inv_k);
        sum = &sum + &term;
        if one_norm(&term) <= tol {
            break;
        }
    }

    let mut result = sum;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}
