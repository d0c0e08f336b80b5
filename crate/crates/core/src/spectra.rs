//! Quantization of Hamiltonians H(I) of a completely integrable system.
//!
//! Action operators are diagonal on the Fourier basis, so a polynomial H is
//! quantized as the diagonal element H(Î_1, ..., Î_m) of the enveloping
//! algebra, with eigenvalue H(n + ε − λ) at basis label n. Because the
//! spectrum is read off pointwise, the same rule extends to a whitelist of
//! analytic scalar maps applied to a polynomial's value; no operator power
//! series is summed. Spectra are enumerated over hypercube label windows
//! max_k |n_k| ≤ N, matching the truncation boxes used by the holonomy
//! module.

use crate::error::{Error, Result};
use crate::fourier::LatticeIndex;
use crate::representation::{action_operator, RepresentationParams, ShiftOperator};
use crate::scalar::{Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A polynomial in the action variables with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPolynomial<T: Real> {
    dim: usize,
    terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Real> ActionPolynomial<T> {
    pub fn zero(dim: usize) -> Self {
        ActionPolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::from_terms(dim, [(vec![0; dim], c)])
    }

    /// The coordinate I_axis.
    pub fn action(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let mut powers = vec![0u32; dim];
        powers[axis] = 1;
        Ok(Self::from_terms(dim, [(powers, T::one())]))
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, T)>) -> Self {
        let mut p = Self::zero(dim);
        for (powers, c) in terms {
            assert_eq!(powers.len(), dim, "term length must equal dimension");
            let entry = p.terms.entry(powers).or_insert_with(T::zero);
            *entry += c;
        }
        p.terms.retain(|_, c| !c.is_zero());
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &T)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|p| p.iter().sum()).max().unwrap_or(0)
    }

    pub fn evaluate(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (powers, &c) in &self.terms {
            let mut m = T::one();
            for (k, &p) in powers.iter().enumerate() {
                m *= point[k].powi(p as i32);
            }
            acc += c * m;
        }
        acc
    }

    pub fn depends_on_axis(&self, axis: usize) -> bool {
        self.terms.keys().any(|powers| powers[axis] > 0)
    }
}

/// Whitelisted analytic scalar maps, each with its domain check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticMap {
    Exp,
    Sqrt,
    Ln,
    Sin,
    Cos,
}

impl AnalyticMap {
    pub fn name(self) -> &'static str {
        match self {
            AnalyticMap::Exp => "exp",
            AnalyticMap::Sqrt => "sqrt",
            AnalyticMap::Ln => "ln",
            AnalyticMap::Sin => "sin",
            AnalyticMap::Cos => "cos",
        }
    }

    /// Apply at a point; the label is carried for error reporting.
    pub fn apply<T: Real>(self, x: T, label: &[i64]) -> Result<T> {
        let bad = |map: &'static str| Error::AnalyticDomain {
            map,
            value: x.to_f64().unwrap_or(f64::NAN),
            label: label.to_vec(),
        };
        match self {
            AnalyticMap::Exp => Ok(x.exp()),
            AnalyticMap::Sqrt => {
                if x < T::zero() {
                    Err(bad("sqrt"))
                } else {
                    Ok(x.sqrt())
                }
            }
            AnalyticMap::Ln => {
                if x <= T::zero() {
                    Err(bad("ln"))
                } else {
                    Ok(x.ln())
                }
            }
            AnalyticMap::Sin => Ok(x.sin()),
            AnalyticMap::Cos => Ok(x.cos()),
        }
    }
}

/// A Hamiltonian depending on the actions only: either a polynomial
/// Σ c_α I^α, or a whitelisted analytic map of a polynomial's value.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec<T: Real> {
    Poly(ActionPolynomial<T>),
    Analytic {
        map: AnalyticMap,
        inner: ActionPolynomial<T>,
    },
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn dim(&self) -> usize {
        match self {
            HamiltonianSpec::Poly(p) => p.dim(),
            HamiltonianSpec::Analytic { inner, .. } => inner.dim(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        HamiltonianSpec::Poly(ActionPolynomial::constant(dim, c))
    }

    pub fn evaluate(&self, point: &[T], label: &[i64]) -> Result<T> {
        match self {
            HamiltonianSpec::Poly(p) => Ok(p.evaluate(point)),
            HamiltonianSpec::Analytic { map, inner } => map.apply(inner.evaluate(point), label),
        }
    }

    pub fn depends_on_axis(&self, axis: usize) -> bool {
        match self {
            HamiltonianSpec::Poly(p) => p.depends_on_axis(axis),
            HamiltonianSpec::Analytic { inner, .. } => inner.depends_on_axis(axis),
        }
    }
}

/// A quantized Hamiltonian: diagonal with the lazily evaluated eigenvalue
/// rule n ↦ H(n + ε − λ).
#[derive(Debug, Clone)]
pub struct DiagonalOperator<T: Real> {
    hamiltonian: HamiltonianSpec<T>,
    rep: RepresentationParams<T>,
}

impl<T: Real> DiagonalOperator<T> {
    pub fn hamiltonian(&self) -> &HamiltonianSpec<T> {
        &self.hamiltonian
    }

    pub fn rep(&self) -> &RepresentationParams<T> {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// The shifted lattice point n + ε − λ fed to H.
    pub fn shifted_point(&self, label: &[i64]) -> Vec<T> {
        label
            .iter()
            .enumerate()
            .map(|(k, &n)| T::of_int(n) + self.rep.epsilon_value(k) - self.rep.lambda()[k])
            .collect()
    }

    pub fn eigenvalue(&self, label: &[i64]) -> Result<T> {
        self.hamiltonian.evaluate(&self.shifted_point(label), label)
    }

    /// The explicit enveloping-algebra form: substitute the action operators
    /// into the polynomial and compose. Cross-check path for the lazy rule;
    /// analytic Hamiltonians have no such form.
    pub fn to_shift_operator(&self) -> Result<ShiftOperator<T>> {
        let poly = match &self.hamiltonian {
            HamiltonianSpec::Poly(p) => p,
            HamiltonianSpec::Analytic { map, .. } => {
                return Err(Error::NotPolynomial { map: map.name() })
            }
        };
        let dim = self.dim();
        let mut acc = ShiftOperator::zero(dim);
        for (powers, &c) in poly.iter() {
            let mut term = ShiftOperator::identity(dim);
            for (axis, &p) in powers.iter().enumerate() {
                let a = action_operator(axis, &self.rep)?;
                for _ in 0..p {
                    term = term.compose(&a)?;
                }
            }
            acc = acc.add(&term.scale(C::new(c, T::zero())))?;
        }
        Ok(acc)
    }
}

/// Pair a Hamiltonian with a representation. For polynomial H this equals
/// the operator obtained by substituting the action operators.
pub fn quantize_hamiltonian<T: Real>(
    hamiltonian: HamiltonianSpec<T>,
    rep: RepresentationParams<T>,
) -> Result<DiagonalOperator<T>> {
    if hamiltonian.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: hamiltonian.dim(),
        });
    }
    Ok(DiagonalOperator { hamiltonian, rep })
}

/// All labels of the hypercube window max_k |n_k| ≤ radius, in lexicographic
/// order.
pub fn lattice_window(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    assert!(radius >= 0, "window radius must be nonnegative");
    let mut out = Vec::new();
    let mut current = vec![-radius; dim];
    loop {
        out.push(current.clone());
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if current[k] < radius {
                current[k] += 1;
                for e in current.iter_mut().skip(k + 1) {
                    *e = -radius;
                }
                break;
            }
        }
    }
}

/// One spectrum line `{n, value}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub n: Vec<i64>,
    pub value: f64,
}

/// Eigenvalues over the window, sorted ascending with lexicographic label
/// tie-break.
pub fn spectrum_window<T: Real>(
    op: &DiagonalOperator<T>,
    radius: i64,
) -> Result<Vec<(T, LatticeIndex)>> {
    let mut out = Vec::new();
    for label in lattice_window(op.dim(), radius) {
        let value = op.eigenvalue(&label)?;
        out.push((value, LatticeIndex(label)));
    }
    out.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("eigenvalues are finite")
            .then_with(|| a.1.cmp(&b.1))
    });
    Ok(out)
}

/// Group window eigenvalues within tol of the group's first member and count
/// multiplicities; returned ascending.
pub fn degeneracy_table<T: Real>(
    op: &DiagonalOperator<T>,
    radius: i64,
    tol: T,
) -> Result<Vec<(T, usize)>> {
    assert!(tol >= T::zero(), "tolerance must be nonnegative");
    let spectrum = spectrum_window(op, radius)?;
    let mut out: Vec<(T, usize)> = Vec::new();
    for (value, _) in spectrum {
        match out.last_mut() {
            Some((head, count)) if value - *head <= tol => *count += 1,
            _ => out.push((value, 1)),
        }
    }
    Ok(out)
}
