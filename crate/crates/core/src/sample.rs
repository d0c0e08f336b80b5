//! Seeded random inputs for property sweeps and the CLI.
//!
//! Everything draws from a caller-supplied [`rand::Rng`], so a fixed seed
//! reproduces a sweep exactly.

use crate::fourier::{FourierSeries, LatticeIndex};
use crate::poisson::{AffineObservable, FourierTaylor};
use crate::representation::{RepresentationParams, Twist};
use crate::scalar::{Real, C};
use rand::Rng;

fn coeff<T: Real>(rng: &mut impl Rng) -> C<T> {
    C::new(
        T::of(rng.random_range(-1.0..1.0)),
        T::of(rng.random_range(-1.0..1.0)),
    )
}

/// A mode within the hypercube of the given radius, restricted to `axes`.
pub fn random_mode_on_axes(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    axes: &[usize],
) -> LatticeIndex {
    let mut entries = vec![0i64; dim];
    for &axis in axes {
        entries[axis] = rng.random_range(-radius..=radius);
    }
    LatticeIndex(entries)
}

pub fn random_mode(rng: &mut impl Rng, dim: usize, radius: i64) -> LatticeIndex {
    let axes: Vec<usize> = (0..dim).collect();
    random_mode_on_axes(rng, dim, radius, &axes)
}

/// A real-valued series with about `n_modes` independent modes inside the
/// support radius, restricted to the given axes.
pub fn random_real_series_on_axes<T: Real>(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    n_modes: usize,
    axes: &[usize],
) -> FourierSeries<T> {
    let mut pairs = Vec::with_capacity(2 * n_modes);
    for _ in 0..n_modes {
        let mode = random_mode_on_axes(rng, dim, radius, axes);
        let mut c: C<T> = coeff(rng);
        if mode.is_zero() {
            c = C::new(c.re, T::zero());
        }
        pairs.push((mode.negated(), c.conj()));
        pairs.push((mode, c));
    }
    FourierSeries::from_coeffs(dim, pairs)
}

pub fn random_real_series<T: Real>(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    n_modes: usize,
) -> FourierSeries<T> {
    let axes: Vec<usize> = (0..dim).collect();
    random_real_series_on_axes(rng, dim, radius, n_modes, &axes)
}

/// A complex series (no reality constraint).
pub fn random_series<T: Real>(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    n_modes: usize,
) -> FourierSeries<T> {
    let pairs = (0..n_modes)
        .map(|_| (random_mode(rng, dim, radius), coeff(rng)))
        .collect::<Vec<_>>();
    FourierSeries::from_coeffs(dim, pairs)
}

/// A real affine observable a^k(φ) I_k + b(φ).
pub fn random_real_affine<T: Real>(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    n_modes: usize,
) -> AffineObservable<T> {
    let a = (0..dim)
        .map(|_| random_real_series(rng, dim, radius, n_modes))
        .collect();
    let b = random_real_series(rng, dim, radius, n_modes);
    AffineObservable::new(a, b).expect("generated components share the dimension")
}

/// An action polynomial with complex trigonometric coefficients, total
/// degree ≤ `max_degree`, built under the given cap.
pub fn random_taylor<T: Real>(
    rng: &mut impl Rng,
    dim: usize,
    radius: i64,
    max_degree: u32,
    n_terms: usize,
    cap: u32,
) -> FourierTaylor<T> {
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let mut alpha = vec![0u32; dim];
        let mut budget = max_degree;
        for slot in alpha.iter_mut() {
            let d = rng.random_range(0..=budget);
            *slot = d;
            budget -= d;
        }
        terms.push((alpha, random_series(rng, dim, radius, 2)));
    }
    FourierTaylor::from_terms(dim, terms)
        .expect("degrees bounded by max_degree")
        .with_cap(cap)
        .expect("cap chosen above max_degree")
}

/// λ uniform in [−2, 2) with a random twist pattern.
pub fn random_rep<T: Real>(rng: &mut impl Rng, dim: usize) -> RepresentationParams<T> {
    let lambda = (0..dim).map(|_| T::of(rng.random_range(-2.0..2.0))).collect();
    let epsilon = (0..dim)
        .map(|_| {
            if rng.random::<bool>() {
                Twist::Half
            } else {
                Twist::Trivial
            }
        })
        .collect();
    RepresentationParams::new(lambda, epsilon).expect("matching lengths")
}

/// An integer gauge vector with entries in [−range, range].
pub fn random_gauge(rng: &mut impl Rng, dim: usize, range: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.random_range(-range..=range)).collect()
}
