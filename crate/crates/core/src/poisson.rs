//! The classical algebra on the symplectic annulus V×T^m.
//!
//! Coordinates are actions I_k and angles φ^k with symplectic form
//! Ω = dI_k ∧ dφ^k. Observables handled here are polynomial in the actions
//! with trigonometric-polynomial coefficients,
//!
//! ```text
//! f(I, φ) = Σ_α c_α(φ) I^α,      α ∈ N^m finite,
//! ```
//!
//! with the affine subclass f = a^k(φ) I_k + b(φ) singled out: it is the
//! largest class compatible with the angle polarization and is closed under
//! the Poisson bracket.
//!
//! Sign convention of the bracket: the single source of sign truth is
//! {I_k, g(φ)} = ∂g/∂φ^k, equivalent to {f,g} = Σ_k (∂f/∂I_k ∂g/∂φ^k −
//! ∂f/∂φ^k ∂g/∂I_k) and to the Hamiltonian vector field ordering
//! ϑ_f = ∂f/∂I_k ∂_k − ∂f/∂φ^k ∂^k.

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, SeriesRecord};
use crate::scalar::{Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default cap on the total action degree of a [`FourierTaylor`].
///
/// Exceeding the cap is an error, never a silent truncation; every identity
/// exercised by this crate needs degree ≤ 2, so 4 leaves room for one product.
pub const DEFAULT_ACTION_DEGREE_CAP: u32 = 4;

/// Multidegree in the action variables.
pub type ActionDegree = Vec<u32>;

fn total_degree(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// An observable affine in the actions: f = a^k(φ) I_k + b(φ).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineObservable<T: Real> {
    dim: usize,
    a: Vec<FourierSeries<T>>,
    b: FourierSeries<T>,
}

/// Serialized form `{a: [m series], b: series}` in the shared record format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineRecord {
    pub a: Vec<Vec<SeriesRecord>>,
    pub b: Vec<SeriesRecord>,
}

impl<T: Real> AffineObservable<T> {
    pub fn new(a: Vec<FourierSeries<T>>, b: FourierSeries<T>) -> Result<Self> {
        let dim = b.dim();
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.len(),
            });
        }
        for s in &a {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
        }
        Ok(AffineObservable { dim, a, b })
    }

    pub fn zero(dim: usize) -> Self {
        AffineObservable {
            dim,
            a: (0..dim).map(|_| FourierSeries::zero(dim)).collect(),
            b: FourierSeries::zero(dim),
        }
    }

    /// The action coordinate I_axis.
    pub fn action(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let mut obs = Self::zero(dim);
        obs.a[axis] = FourierSeries::constant(dim, C::new(T::one(), T::zero()));
        Ok(obs)
    }

    /// A pure angle function: f = b(φ).
    pub fn angle_function(b: FourierSeries<T>) -> Self {
        let dim = b.dim();
        AffineObservable {
            dim,
            a: (0..dim).map(|_| FourierSeries::zero(dim)).collect(),
            b,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action_coefficient(&self, axis: usize) -> &FourierSeries<T> {
        &self.a[axis]
    }

    pub fn action_coefficients(&self) -> &[FourierSeries<T>] {
        &self.a
    }

    pub fn angle_part(&self) -> &FourierSeries<T> {
        &self.b
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.a.iter().all(|s| s.is_real(tol)) && self.b.is_real(tol)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut a = Vec::with_capacity(self.dim);
        for (x, y) in self.a.iter().zip(&other.a) {
            a.push(x.add(y)?);
        }
        Self::new(a, self.b.add(&other.b)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        AffineObservable {
            dim: self.dim,
            a: self.a.iter().map(FourierSeries::neg).collect(),
            b: self.b.neg(),
        }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        AffineObservable {
            dim: self.dim,
            a: self.a.iter().map(|s| s.scale(c)).collect(),
            b: self.b.scale(c),
        }
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

    /// Poisson bracket within the affine class. With g = c^k I_k + d,
    /// the result has action coefficients a^k ∂_k c^r − c^k ∂_k a^r and
    /// angle part a^k ∂_k d − c^k ∂_k b.
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut a_out: Vec<FourierSeries<T>> =
            (0..self.dim).map(|_| FourierSeries::zero(self.dim)).collect();
        let mut b_out = FourierSeries::zero(self.dim);
        for k in 0..self.dim {
            for (r, a_r) in a_out.iter_mut().enumerate() {
                let fwd = self.a[k].convolve_mul(&other.a[r].angle_derivative(k)?)?;
                let bwd = other.a[k].convolve_mul(&self.a[r].angle_derivative(k)?)?;
                *a_r = a_r.add(&fwd.sub(&bwd)?)?;
            }
            let fwd = self.a[k].convolve_mul(&other.b.angle_derivative(k)?)?;
            let bwd = other.a[k].convolve_mul(&self.b.angle_derivative(k)?)?;
            b_out = b_out.add(&fwd.sub(&bwd)?)?;
        }
        Self::new(a_out, b_out)
    }

    /// View as a degree-≤1 action polynomial.
    pub fn to_taylor(&self) -> FourierTaylor<T> {
        let mut terms = BTreeMap::new();
        if !self.b.is_empty() {
            terms.insert(vec![0u32; self.dim], self.b.clone());
        }
        for (k, ak) in self.a.iter().enumerate() {
            if !ak.is_empty() {
                let mut alpha = vec![0u32; self.dim];
                alpha[k] = 1;
                terms.insert(alpha, ak.clone());
            }
        }
        FourierTaylor {
            dim: self.dim,
            terms,
            cap: DEFAULT_ACTION_DEGREE_CAP,
        }
    }

    pub fn max_abs_coeff(&self) -> T {
        self.a
            .iter()
            .map(|s| s.max_abs_coeff())
            .fold(self.b.max_abs_coeff(), T::max)
    }

    /// Largest Fourier support radius over all component series.
    pub fn support_radius(&self) -> i64 {
        self.a
            .iter()
            .map(|s| s.support_radius())
            .fold(self.b.support_radius(), i64::max)
    }

    pub fn to_record(&self) -> AffineRecord {
        AffineRecord {
            a: self.a.iter().map(|s| s.to_records()).collect(),
            b: self.b.to_records(),
        }
    }

    pub fn from_record(dim: usize, record: &AffineRecord) -> Result<Self> {
        if record.a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: record.a.len(),
            });
        }
        let a = record
            .a
            .iter()
            .map(|r| FourierSeries::from_records(dim, r))
            .collect::<Result<Vec<_>>>()?;
        let b = FourierSeries::from_records(dim, &record.b)?;
        Self::new(a, b)
    }
}

/// A function polynomial in the actions with Fourier coefficients:
/// Σ_α c_α(φ) I^α. Houses general observables and symbolic sections of the
/// prequantum line bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTaylor<T: Real> {
    dim: usize,
    terms: BTreeMap<ActionDegree, FourierSeries<T>>,
    cap: u32,
}

impl<T: Real> FourierTaylor<T> {
    pub fn zero(dim: usize) -> Self {
        FourierTaylor {
            dim,
            terms: BTreeMap::new(),
            cap: DEFAULT_ACTION_DEGREE_CAP,
        }
    }

    pub fn constant(dim: usize, c: C<T>) -> Self {
        Self::from_series(FourierSeries::constant(dim, c))
    }

    /// A function of the angles only (action degree zero).
    pub fn from_series(series: FourierSeries<T>) -> Self {
        let dim = series.dim();
        let mut t = Self::zero(dim);
        if !series.is_empty() {
            t.terms.insert(vec![0; dim], series);
        }
        t
    }

    /// The monomial I^α with unit coefficient.
    pub fn action_monomial(dim: usize, alpha: ActionDegree) -> Result<Self> {
        if alpha.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: alpha.len(),
            });
        }
        let mut t = Self::zero(dim);
        let deg = total_degree(&alpha);
        if deg > t.cap {
            return Err(Error::DegreeCapExceeded {
                degree: deg,
                cap: t.cap,
            });
        }
        t.terms
            .insert(alpha, FourierSeries::constant(dim, C::new(T::one(), T::zero())));
        Ok(t)
    }

    /// Assemble from (multidegree, series) pairs.
    pub fn from_terms(
        dim: usize,
        pairs: impl IntoIterator<Item = (ActionDegree, FourierSeries<T>)>,
    ) -> Result<Self> {
        let mut t = Self::zero(dim);
        for (alpha, series) in pairs {
            if alpha.len() != dim || series.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: alpha.len().max(series.dim()),
                });
            }
            let deg = total_degree(&alpha);
            if deg > t.cap {
                return Err(Error::DegreeCapExceeded {
                    degree: deg,
                    cap: t.cap,
                });
            }
            if series.is_empty() {
                continue;
            }
            match t.terms.entry(alpha) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(series);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&series)?;
                    e.insert(sum);
                }
            }
        }
        t.drop_empty();
        Ok(t)
    }

    /// Raise (or lower) the action-degree cap. Lowering below the present
    /// degree is an error.
    pub fn with_cap(mut self, cap: u32) -> Result<Self> {
        let deg = self.degree();
        if deg > cap {
            return Err(Error::DegreeCapExceeded { degree: deg, cap });
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total action degree present.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| total_degree(a)).max().unwrap_or(0)
    }

    pub fn term(&self, alpha: &[u32]) -> FourierSeries<T> {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| FourierSeries::zero(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActionDegree, &FourierSeries<T>)> {
        self.terms.iter()
    }

    fn drop_empty(&mut self) {
        self.terms.retain(|_, s| !s.is_empty());
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

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.cap = self.cap.max(other.cap);
        for (alpha, series) in &other.terms {
            match out.terms.entry(alpha.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(series.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(series)?;
                    e.insert(sum);
                }
            }
        }
        out.drop_empty();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for s in out.terms.values_mut() {
            *s = s.neg();
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for s in out.terms.values_mut() {
            *s = s.scale(c);
        }
        out.drop_empty();
        out
    }

    /// Product of action polynomials; errors when the resulting total degree
    /// would exceed the cap.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let cap = self.cap.max(other.cap);
        if !self.is_empty() && !other.is_empty() {
            let deg = self.degree() + other.degree();
            if deg > cap {
                return Err(Error::DegreeCapExceeded { degree: deg, cap });
            }
        }
        let mut out = Self::zero(self.dim);
        out.cap = cap;
        for (alpha, fa) in &self.terms {
            for (beta, gb) in &other.terms {
                let gamma: ActionDegree =
                    alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
                let prod = fa.convolve_mul(gb)?;
                match out.terms.entry(gamma) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get().add(&prod)?;
                        e.insert(sum);
                    }
                }
            }
        }
        out.drop_empty();
        Ok(out)
    }

    /// Multiply by the action coordinate I_axis.
    pub fn mul_action(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let deg = self.degree() + 1;
        if !self.is_empty() && deg > self.cap {
            return Err(Error::DegreeCapExceeded {
                degree: deg,
                cap: self.cap,
            });
        }
        let mut out = Self::zero(self.dim);
        out.cap = self.cap;
        for (alpha, series) in &self.terms {
            let mut gamma = alpha.clone();
            gamma[axis] += 1;
            out.terms.insert(gamma, series.clone());
        }
        Ok(out)
    }

    /// ∂/∂I_axis: the term at α moves to α − e_axis scaled by α_axis.
    pub fn action_derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        out.cap = self.cap;
        for (alpha, series) in &self.terms {
            if alpha[axis] == 0 {
                continue;
            }
            let mut gamma = alpha.clone();
            gamma[axis] -= 1;
            let factor = C::new(T::of(alpha[axis] as f64), T::zero());
            let scaled = series.scale(factor);
            match out.terms.entry(gamma) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(scaled);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&scaled)?;
                    e.insert(sum);
                }
            }
        }
        out.drop_empty();
        Ok(out)
    }

    /// ∂/∂φ^axis applied to every coefficient series.
    pub fn angle_derivative(&self, axis: usize) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        out.cap = self.cap;
        for (alpha, series) in &self.terms {
            let d = series.angle_derivative(axis)?;
            if !d.is_empty() {
                out.terms.insert(alpha.clone(), d);
            }
        }
        Ok(out)
    }

    /// {f,g} = Σ_k (∂f/∂I_k ∂g/∂φ^k − ∂f/∂φ^k ∂g/∂I_k).
    pub fn poisson_bracket(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        out.cap = self.cap.max(other.cap);
        for k in 0..self.dim {
            let fwd = self
                .action_derivative(k)?
                .mul(&other.angle_derivative(k)?)?;
            let bwd = self
                .angle_derivative(k)?
                .mul(&other.action_derivative(k)?)?;
            out = out.add(&fwd.sub(&bwd)?)?;
        }
        Ok(out)
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.terms.values().all(|s| s.is_real(tol))
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms
            .values()
            .map(|s| s.max_abs_coeff())
            .fold(T::zero(), T::max)
    }

    /// Σ_α c_α(φ) I^α at a point of the annulus.
    pub fn evaluate(&self, actions: &[T], angles: &[T]) -> C<T> {
        let mut acc = C::default();
        for (alpha, series) in &self.terms {
            let mut monomial = T::one();
            for (k, &p) in alpha.iter().enumerate() {
                monomial *= actions[k].powi(p as i32);
            }
            acc += series.evaluate(angles) * C::new(monomial, T::zero());
        }
        acc
    }

    /// Some(f as affine observable) when the action degree is ≤ 1 and every
    /// degree-1 term is a pure coordinate.
    pub fn to_affine(&self) -> Option<AffineObservable<T>> {
        if self.degree() > 1 {
            return None;
        }
        let mut obs = AffineObservable::zero(self.dim);
        for (alpha, series) in &self.terms {
            match total_degree(alpha) {
                0 => obs.b = series.clone(),
                1 => {
                    let axis = alpha.iter().position(|&p| p == 1).unwrap();
                    obs.a[axis] = series.clone();
                }
                _ => return None,
            }
        }
        Some(obs)
    }
}

/// A vector field on the annulus with polynomial-in-action coefficients:
/// Σ_k angle_k(I,φ) ∂/∂φ^k + Σ_k action_k(I,φ) ∂/∂I_k.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldOnAnnulus<T: Real> {
    angle: Vec<FourierTaylor<T>>,
    action: Vec<FourierTaylor<T>>,
}

impl<T: Real> VectorFieldOnAnnulus<T> {
    pub fn angle_component(&self, k: usize) -> &FourierTaylor<T> {
        &self.angle[k]
    }

    pub fn action_component(&self, k: usize) -> &FourierTaylor<T> {
        &self.action[k]
    }

    pub fn dim(&self) -> usize {
        self.angle.len()
    }

    /// Directional derivative of g along the field.
    pub fn apply_to(&self, g: &FourierTaylor<T>) -> Result<FourierTaylor<T>> {
        let mut out = FourierTaylor::zero(g.dim());
        for k in 0..self.angle.len() {
            out = out.add(&self.angle[k].mul(&g.angle_derivative(k)?)?)?;
            out = out.add(&self.action[k].mul(&g.action_derivative(k)?)?)?;
        }
        Ok(out)
    }
}

/// ϑ_f: angle component k is ∂f/∂I_k, action component k is −∂f/∂φ^k.
pub fn hamiltonian_vector_field<T: Real>(f: &FourierTaylor<T>) -> Result<VectorFieldOnAnnulus<T>> {
    let dim = f.dim();
    let mut angle = Vec::with_capacity(dim);
    let mut action = Vec::with_capacity(dim);
    for k in 0..dim {
        angle.push(f.action_derivative(k)?);
        action.push(f.angle_derivative(k)?.neg());
    }
    Ok(VectorFieldOnAnnulus { angle, action })
}
