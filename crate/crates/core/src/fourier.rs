//! Exact arithmetic for trigonometric polynomials (finite Fourier series) on
//! the m-torus.
//!
//! A series is a finitely supported table of complex coefficients over the
//! mode lattice Z^m,
//!
//! ```text
//! f(φ) = Σ_n f_n e^{i n·φ},     n ∈ Z^m.
//! ```
//!
//! Products are exact convolutions of coefficient tables; no sampling or FFT
//! is involved. Supports stay small by construction, and every operation
//! prunes coefficients below the configured threshold so repeated products
//! keep finite support.

use crate::error::{Error, Result};
use crate::scalar::{default_prune_eps, Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Fourier mode / basis label: a point n of the lattice Z^m.
///
/// Ordered lexicographically, which fixes deterministic iteration and
/// serialization everywhere a set of modes is traversed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeIndex(pub Vec<i64>);

impl LatticeIndex {
    pub fn zero(dim: usize) -> Self {
        LatticeIndex(vec![0; dim])
    }

    /// n·e_axis: a single nonzero entry.
    pub fn unit(dim: usize, axis: usize, n: i64) -> Self {
        let mut v = vec![0; dim];
        v[axis] = n;
        LatticeIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }

    /// Componentwise sum, the mode of a product of basis functions.
    pub fn shifted(&self, other: &LatticeIndex) -> LatticeIndex {
        LatticeIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn negated(&self) -> LatticeIndex {
        LatticeIndex(self.0.iter().map(|n| -n).collect())
    }

    /// max_k |n_k|, the hypercube radius of the mode.
    pub fn radius(&self) -> i64 {
        self.0.iter().map(|n| n.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// One serialized coefficient: `{mode, re, im}`.
///
/// This record format is shared with the CLI config schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub mode: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// A smooth function on T^m with finite Fourier support.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<T: Real> {
    dim: usize,
    coeffs: BTreeMap<LatticeIndex, C<T>>,
    prune_eps: T,
}

impl<T: Real> FourierSeries<T> {
    /// The zero function (empty support).
    pub fn zero(dim: usize) -> Self {
        FourierSeries {
            dim,
            coeffs: BTreeMap::new(),
            prune_eps: default_prune_eps::<T>(),
        }
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: C<T>) -> Self {
        Self::from_coeffs(dim, [(LatticeIndex::zero(dim), c)])
    }

    /// `c · e^{i n·φ}` for a single mode n.
    pub fn mode(mode: LatticeIndex, c: C<T>) -> Self {
        let dim = mode.dim();
        Self::from_coeffs(dim, [(mode, c)])
    }

    /// cos(n·φ) = ½ e^{i n·φ} + ½ e^{-i n·φ}.
    pub fn cosine(mode: LatticeIndex) -> Self {
        let half = C::new(T::of(0.5), T::zero());
        let dim = mode.dim();
        let neg = mode.negated();
        Self::from_coeffs(dim, [(mode, half), (neg, half)])
    }

    /// sin(n·φ) = -i/2 e^{i n·φ} + i/2 e^{-i n·φ}.
    pub fn sine(mode: LatticeIndex) -> Self {
        let half_i = C::new(T::zero(), T::of(0.5));
        let dim = mode.dim();
        let neg = mode.negated();
        Self::from_coeffs(dim, [(mode.clone(), -half_i), (neg, half_i)])
    }

    /// Build from (mode, coefficient) pairs; repeated modes accumulate.
    pub fn from_coeffs(dim: usize, pairs: impl IntoIterator<Item = (LatticeIndex, C<T>)>) -> Self {
        let mut s = Self::zero(dim);
        for (mode, c) in pairs {
            assert_eq!(mode.dim(), dim, "mode length must equal the dimension");
            let entry = s.coeffs.entry(mode).or_insert_with(C::default);
            *entry += c;
        }
        s.prune();
        s
    }

    /// Replace the prune threshold (applies it immediately).
    pub fn with_prune_eps(mut self, eps: T) -> Self {
        self.prune_eps = eps;
        self.prune();
        self
    }

    pub fn prune_eps(&self) -> T {
        self.prune_eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient at a mode (zero when absent).
    pub fn coeff(&self, mode: &LatticeIndex) -> C<T> {
        self.coeffs.get(mode).copied().unwrap_or_default()
    }

    /// Deterministic (lexicographic) iteration over the support.
    pub fn iter(&self) -> impl Iterator<Item = (&LatticeIndex, &C<T>)> {
        self.coeffs.iter()
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs
            .values()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest hypercube radius over the support.
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(|n| n.radius()).max().unwrap_or(0)
    }

    /// True when every mode is supported only on the given axes.
    pub fn supported_within(&self, axes: &[usize]) -> bool {
        self.coeffs.keys().all(|mode| {
            mode.entries()
                .iter()
                .enumerate()
                .all(|(k, &n)| n == 0 || axes.contains(&k))
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn prune(&mut self) {
        let eps = self.prune_eps;
        self.coeffs.retain(|_, c| c.norm() > eps);
    }

    /// Coefficientwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.prune_eps = self.prune_eps.max(other.prune_eps);
        for (mode, c) in &other.coeffs {
            let entry = out.coeffs.entry(mode.clone()).or_default();
            *entry += *c;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    /// Pointwise product: exact convolution of coefficient tables,
    /// (fg)_u = Σ_{s+t=u} f_s g_t.
    pub fn convolve_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        out.prune_eps = self.prune_eps.max(other.prune_eps);
        for (s, fs) in &self.coeffs {
            for (t, gt) in &other.coeffs {
                let u = s.shifted(t);
                let entry = out.coeffs.entry(u).or_insert_with(C::default);
                *entry += *fs * *gt;
            }
        }
        out.prune();
        Ok(out)
    }

    /// ∂/∂φ^axis: the coefficient at n becomes i·n_axis·f_n.
    pub fn angle_derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        out.prune_eps = self.prune_eps;
        for (mode, c) in &self.coeffs {
            let n = T::of_int(mode.entries()[axis]);
            let v = C::new(T::zero(), n) * *c;
            if !v.norm().is_zero() {
                out.coeffs.insert(mode.clone(), v);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Complex conjugate of the function: coefficients conj(f_{-n}).
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.dim);
        out.prune_eps = self.prune_eps;
        for (mode, c) in &self.coeffs {
            out.coeffs.insert(mode.negated(), c.conj());
        }
        out
    }

    /// True iff |f_{-n} - conj(f_n)| ≤ tol over the support, i.e. the
    /// function is real-valued up to tol.
    pub fn is_real(&self, tol: T) -> bool {
        self.coeffs.iter().all(|(mode, c)| {
            let mirrored = self.coeff(&mode.negated());
            (mirrored - c.conj()).norm() <= tol
        })
    }

    /// Σ_n f_n e^{i n·φ}, the spot-check oracle for coefficient arithmetic.
    pub fn evaluate(&self, angles: &[T]) -> C<T> {
        assert_eq!(angles.len(), self.dim, "angle vector length must equal dim");
        let mut acc = C::default();
        for (mode, c) in &self.coeffs {
            let phase: T = mode
                .entries()
                .iter()
                .zip(angles)
                .fold(T::zero(), |p, (&n, &phi)| p + T::of_int(n) * phi);
            acc += *c * C::from_polar(T::one(), phase);
        }
        acc
    }

    /// Serialize as the shared `{mode, re, im}` record list.
    pub fn to_records(&self) -> Vec<SeriesRecord> {
        self.coeffs
            .iter()
            .map(|(mode, c)| SeriesRecord {
                mode: mode.0.clone(),
                re: c.re.to_f64().unwrap_or(f64::NAN),
                im: c.im.to_f64().unwrap_or(f64::NAN),
            })
            .collect()
    }

    /// Rebuild from records; every mode must have length `dim`.
    pub fn from_records(dim: usize, records: &[SeriesRecord]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(records.len());
        for r in records {
            if r.mode.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.mode.len(),
                });
            }
            pairs.push((
                LatticeIndex(r.mode.clone()),
                C::new(T::of(r.re), T::of(r.im)),
            ));
        }
        Ok(Self::from_coeffs(dim, pairs))
    }
}
