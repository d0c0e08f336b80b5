//! The polarized quantum algebra: affine observables represented as band
//! ("shift") operators on the Fourier basis of T^m.
//!
//! A representation is selected by λ ∈ R^m (the connection class) and a
//! half-form twist ε ∈ {0, ½}^m. The basis label n ∈ Z^m stands for the
//! (possibly ε-shifted) basis function; the quantized observable
//! f = a^k(φ)I_k + b(φ) acts by
//!
//! ```text
//! ψ_n ↦ Σ_s p_s(n) ψ_{n+s},
//! p_s(n) = Σ_k a^k_s (n_k + ε_k + s_k/2 − λ_k) + b_s,
//! ```
//!
//! where a^k_s, b_s are Fourier coefficients of f. The twist and connection
//! parameters are baked into the band polynomials at quantization time, so
//! operator identities (Dirac condition, Hermiticity, gauge conjugation,
//! twist reduction) are exact statements about polynomial coefficients with
//! no truncation involved.
//!
//! Double-valued basis functions are never represented directly; the
//! nontrivial twist appears only through ε-shifted labels.

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, LatticeIndex};
use crate::poisson::AffineObservable;
use crate::scalar::{default_prune_eps, imag_unit, Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Half-form (metalinear) twist of one torus axis. The nontrivial choice
/// flips the sign of sections under a 2π shift of that angle and offsets the
/// basis labels by ½.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Twist {
    Trivial,
    Half,
}

impl Twist {
    pub fn value<T: Real>(self) -> T {
        match self {
            Twist::Trivial => T::zero(),
            Twist::Half => T::of(0.5),
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 0.0 {
            Ok(Twist::Trivial)
        } else if v == 0.5 {
            Ok(Twist::Half)
        } else {
            Err(Error::InvalidTwist { value: v })
        }
    }
}

impl Serialize for Twist {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(match self {
            Twist::Trivial => 0.0,
            Twist::Half => 0.5,
        })
    }
}

impl<'de> Deserialize<'de> for Twist {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Twist::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// Selects one representation of the quantum algebra: λ plus the twist
/// pattern. λ is accepted as arbitrary reals; representations whose λ differ
/// by integers are gauge conjugated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationParams<T: Real> {
    lambda: Vec<T>,
    epsilon: Vec<Twist>,
}

impl<T: Real> RepresentationParams<T> {
    pub fn new(lambda: Vec<T>, epsilon: Vec<Twist>) -> Result<Self> {
        if lambda.len() != epsilon.len() {
            return Err(Error::DimensionMismatch {
                expected: lambda.len(),
                found: epsilon.len(),
            });
        }
        Ok(RepresentationParams { lambda, epsilon })
    }

    /// λ = 0, trivial twist.
    pub fn trivial(dim: usize) -> Self {
        RepresentationParams {
            lambda: vec![T::zero(); dim],
            epsilon: vec![Twist::Trivial; dim],
        }
    }

    pub fn with_lambda(lambda: Vec<T>) -> Self {
        let dim = lambda.len();
        RepresentationParams {
            lambda,
            epsilon: vec![Twist::Trivial; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn epsilon(&self) -> &[Twist] {
        &self.epsilon
    }

    pub fn epsilon_value(&self, axis: usize) -> T {
        self.epsilon[axis].value()
    }

    /// Shift λ by an integer gauge vector.
    pub fn gauge_shifted(&self, d: &[i64]) -> Self {
        RepresentationParams {
            lambda: self
                .lambda
                .iter()
                .zip(d)
                .map(|(&l, &dk)| l + T::of_int(dk))
                .collect(),
            epsilon: self.epsilon.clone(),
        }
    }

    /// Fold the half-form twist into the connection class: (λ, ε) ↦ (λ−ε, 0).
    /// Quantization under the two parameter sets produces identical band
    /// polynomials.
    pub fn twist_reduce(&self) -> Self {
        RepresentationParams {
            lambda: self
                .lambda
                .iter()
                .zip(&self.epsilon)
                .map(|(&l, &e)| l - e.value::<T>())
                .collect(),
            epsilon: vec![Twist::Trivial; self.lambda.len()],
        }
    }

    /// The gauge-class representative with λ entries in [0,1).
    pub fn normalized(&self) -> Self {
        RepresentationParams {
            lambda: self
                .lambda
                .iter()
                .map(|&l| {
                    let f = l.fract();
                    if f < T::zero() {
                        f + T::one()
                    } else {
                        f
                    }
                })
                .collect(),
            epsilon: self.epsilon.clone(),
        }
    }

    /// Spectral witness of equivalence: the action spectra
    /// {n + ε_k − λ_k : n ∈ Z} coincide per axis iff the offsets differ by
    /// integers. Representations failing this are inequivalent.
    pub fn spectrally_equivalent(&self, other: &Self, tol: T) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        self.lambda
            .iter()
            .zip(&self.epsilon)
            .zip(other.lambda.iter().zip(&other.epsilon))
            .all(|((&l, &e), (&l2, &e2))| {
                let offset = (e.value::<T>() - l) - (e2.value::<T>() - l2);
                (offset - offset.round()).abs() <= tol
            })
    }
}

/// A sparse polynomial in the basis-label variables n_1..n_m with complex
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPolynomial<T: Real> {
    dim: usize,
    monomials: BTreeMap<Vec<u32>, C<T>>,
}

impl<T: Real> CoefficientPolynomial<T> {
    pub fn zero(dim: usize) -> Self {
        CoefficientPolynomial {
            dim,
            monomials: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C<T>) -> Self {
        let mut p = Self::zero(dim);
        p.accumulate(vec![0; dim], c);
        p.prune();
        p
    }

    /// c·n_axis + d.
    pub fn affine_in_axis(dim: usize, axis: usize, c: C<T>, d: C<T>) -> Self {
        let mut p = Self::zero(dim);
        let mut powers = vec![0u32; dim];
        powers[axis] = 1;
        p.accumulate(powers, c);
        p.accumulate(vec![0; dim], d);
        p.prune();
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, C<T>)>) -> Self {
        let mut p = Self::zero(dim);
        for (powers, c) in terms {
            assert_eq!(powers.len(), dim, "monomial length must equal dimension");
            p.accumulate(powers, c);
        }
        p.prune();
        p
    }

    fn accumulate(&mut self, powers: Vec<u32>, c: C<T>) {
        let entry = self.monomials.entry(powers).or_default();
        *entry += c;
    }

    fn prune(&mut self) {
        let eps = default_prune_eps::<T>();
        self.monomials.retain(|_, c| c.norm() > eps);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn coeff(&self, powers: &[u32]) -> C<T> {
        self.monomials.get(powers).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &C<T>)> {
        self.monomials.iter()
    }

    pub fn degree(&self) -> u32 {
        self.monomials
            .keys()
            .map(|p| p.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.monomials
            .values()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (powers, c) in &other.monomials {
            out.accumulate(powers.clone(), *c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.monomials.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for v in out.monomials.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.monomials {
            for (b, cb) in &other.monomials {
                let powers: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.accumulate(powers, *ca * *cb);
            }
        }
        out.prune();
        out
    }

    /// Exact substitution n ↦ n + t for an integer shift t, by binomial
    /// expansion per axis.
    pub fn shift_arg(&self, t: &[i64]) -> Self {
        let mut out = Self::zero(self.dim);
        for (powers, c) in &self.monomials {
            // Expand Π_k (n_k + t_k)^{powers_k}.
            let mut partial: Vec<(Vec<u32>, C<T>)> = vec![(Vec::with_capacity(self.dim), *c)];
            for (k, &pk) in powers.iter().enumerate() {
                let tk = t[k];
                let mut next = Vec::with_capacity(partial.len() * (pk as usize + 1));
                for (mono, coeff) in &partial {
                    if tk == 0 || pk == 0 {
                        let mut m = mono.clone();
                        m.push(pk);
                        next.push((m, *coeff));
                        continue;
                    }
                    for j in 0..=pk {
                        let binom = binomial(pk, j);
                        let factor = T::of(binom as f64) * T::of_int(tk).powi((pk - j) as i32);
                        let mut m = mono.clone();
                        m.push(j);
                        next.push((m, *coeff * C::new(factor, T::zero())));
                    }
                }
                partial = next;
            }
            for (mono, coeff) in partial {
                out.accumulate(mono, coeff);
            }
        }
        out.prune();
        out
    }

    /// Conjugate every coefficient (the polynomial variables stay real).
    pub fn conj_coeffs(&self) -> Self {
        let mut out = self.clone();
        for c in out.monomials.values_mut() {
            *c = c.conj();
        }
        out
    }

    pub fn eval(&self, point: &[T]) -> C<T> {
        let mut acc = C::default();
        for (powers, c) in &self.monomials {
            let mut m = T::one();
            for (k, &p) in powers.iter().enumerate() {
                m *= point[k].powi(p as i32);
            }
            acc += *c * C::new(m, T::zero());
        }
        acc
    }

    pub fn eval_at_label(&self, label: &[i64]) -> C<T> {
        let point: Vec<T> = label.iter().map(|&n| T::of_int(n)).collect();
        self.eval(&point)
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k.min(n));
    let mut num = 1u64;
    let mut den = 1u64;
    for j in 0..k {
        num *= (n - j) as u64;
        den *= (j + 1) as u64;
    }
    num / den
}

/// One serialized band term `{powers, re, im}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTermRecord {
    pub powers: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// One serialized band `{shift, poly}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShiftBandRecord {
    pub shift: Vec<i64>,
    pub poly: Vec<PolyTermRecord>,
}

/// A band operator on the Fourier lattice: a finite map from lattice shifts
/// to label polynomials, acting by ψ_n ↦ Σ_s p_s(n) ψ_{n+s}.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator<T: Real> {
    dim: usize,
    bands: BTreeMap<Vec<i64>, CoefficientPolynomial<T>>,
}

impl<T: Real> ShiftOperator<T> {
    pub fn zero(dim: usize) -> Self {
        ShiftOperator {
            dim,
            bands: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim);
        op.bands.insert(
            vec![0; dim],
            CoefficientPolynomial::constant(dim, C::new(T::one(), T::zero())),
        );
        op
    }

    /// Multiplication by the pure phase with mode d: the band (d ↦ 1).
    pub fn pure_phase(mode: &LatticeIndex) -> Self {
        let dim = mode.dim();
        let mut op = Self::zero(dim);
        op.bands.insert(
            mode.entries().to_vec(),
            CoefficientPolynomial::constant(dim, C::new(T::one(), T::zero())),
        );
        op
    }

    /// Multiplication by a function of the angles: each Fourier coefficient
    /// becomes a constant band.
    pub fn multiplication(series: &FourierSeries<T>) -> Self {
        let dim = series.dim();
        let mut op = Self::zero(dim);
        for (mode, c) in series.iter() {
            op.bands.insert(
                mode.entries().to_vec(),
                CoefficientPolynomial::constant(dim, *c),
            );
        }
        op.drop_empty();
        op
    }

    pub fn from_bands(
        dim: usize,
        bands: impl IntoIterator<Item = (Vec<i64>, CoefficientPolynomial<T>)>,
    ) -> Self {
        let mut op = Self::zero(dim);
        for (shift, poly) in bands {
            assert_eq!(shift.len(), dim, "shift length must equal dimension");
            match op.bands.entry(shift) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(poly);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&poly);
                    e.insert(sum);
                }
            }
        }
        op.drop_empty();
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn band(&self, shift: &[i64]) -> CoefficientPolynomial<T> {
        self.bands
            .get(shift)
            .cloned()
            .unwrap_or_else(|| CoefficientPolynomial::zero(self.dim))
    }

    pub fn bands(&self) -> impl Iterator<Item = (&Vec<i64>, &CoefficientPolynomial<T>)> {
        self.bands.iter()
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Largest |s_k| over the stored bands.
    pub fn max_band_radius(&self) -> i64 {
        self.bands
            .keys()
            .flat_map(|s| s.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Highest polynomial degree over the bands.
    pub fn degree(&self) -> u32 {
        self.bands.values().map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.bands
            .values()
            .map(|p| p.max_abs_coeff())
            .fold(T::zero(), T::max)
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.max_abs_coeff() <= tol
    }

    fn drop_empty(&mut self) {
        self.bands.retain(|_, p| !p.is_empty());
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
        for (shift, poly) in &other.bands {
            match out.bands.entry(shift.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(poly.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(poly);
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
        for p in out.bands.values_mut() {
            *p = p.neg();
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for p in out.bands.values_mut() {
            *p = p.scale(c);
        }
        out.drop_empty();
        out
    }

    /// Operator product. The band at u collects Σ_{s+t=u} p_s(n+t)·q_t(n);
    /// the substitution n ↦ n+t is exact polynomial arithmetic.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (s, p) in &self.bands {
            for (t, q) in &other.bands {
                let u: Vec<i64> = s.iter().zip(t).map(|(a, b)| a + b).collect();
                let term = p.shift_arg(t).mul(q);
                match out.bands.entry(u) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(term);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let sum = e.get().add(&term);
                        e.insert(sum);
                    }
                }
            }
        }
        out.drop_empty();
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Adjoint with respect to the normalized torus Hermitian form:
    /// the band at s becomes conj(p_{−s}) with argument shifted by s.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (s, p) in &self.bands {
            let neg: Vec<i64> = s.iter().map(|x| -x).collect();
            out.bands.insert(neg.clone(), p.conj_coeffs().shift_arg(&neg));
        }
        out.drop_empty();
        out
    }

    /// Amplitudes of the image of the basis vector with label n:
    /// pairs (n+s, p_s(n)).
    pub fn apply_to_mode(&self, label: &[i64]) -> Vec<(LatticeIndex, C<T>)> {
        self.bands
            .iter()
            .map(|(s, p)| {
                let target: Vec<i64> = label.iter().zip(s).map(|(a, b)| a + b).collect();
                (LatticeIndex(target), p.eval_at_label(label))
            })
            .collect()
    }

    /// Apply to a finitely supported state written in the basis labels.
    pub fn apply_to_series(&self, state: &FourierSeries<T>) -> Result<FourierSeries<T>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.dim(),
            });
        }
        let mut pairs = Vec::new();
        for (label, amp) in state.iter() {
            for (target, weight) in self.apply_to_mode(label.entries()) {
                pairs.push((target, weight * *amp));
            }
        }
        Ok(FourierSeries::from_coeffs(self.dim, pairs))
    }

    pub fn to_records(&self) -> Vec<ShiftBandRecord> {
        self.bands
            .iter()
            .map(|(shift, poly)| ShiftBandRecord {
                shift: shift.clone(),
                poly: poly
                    .iter()
                    .map(|(powers, c)| PolyTermRecord {
                        powers: powers.clone(),
                        re: c.re.to_f64().unwrap_or(f64::NAN),
                        im: c.im.to_f64().unwrap_or(f64::NAN),
                    })
                    .collect(),
            })
            .collect()
    }

    pub fn from_records(dim: usize, records: &[ShiftBandRecord]) -> Result<Self> {
        let mut bands = Vec::new();
        for r in records {
            if r.shift.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.shift.len(),
                });
            }
            let poly = CoefficientPolynomial::from_terms(
                dim,
                r.poly
                    .iter()
                    .map(|t| (t.powers.clone(), C::new(T::of(t.re), T::of(t.im)))),
            );
            bands.push((r.shift.clone(), poly));
        }
        Ok(Self::from_bands(dim, bands))
    }
}

/// Quantize an affine observable in the representation (λ, ε): the band at
/// shift s carries p_s(n) = Σ_k a^k_s (n_k + ε_k + s_k/2 − λ_k) + b_s.
pub fn quantize_affine<T: Real>(
    f: &AffineObservable<T>,
    rep: &RepresentationParams<T>,
) -> Result<ShiftOperator<T>> {
    let dim = f.dim();
    if dim != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: dim,
        });
    }
    let half = T::of(0.5);
    let mut bands: BTreeMap<Vec<i64>, CoefficientPolynomial<T>> = BTreeMap::new();
    for k in 0..dim {
        for (mode, &a) in f.action_coefficient(k).iter() {
            let s = mode.entries();
            let offset = rep.epsilon_value(k) + half * T::of_int(s[k]) - rep.lambda()[k];
            let poly = CoefficientPolynomial::affine_in_axis(
                dim,
                k,
                a,
                a * C::new(offset, T::zero()),
            );
            match bands.entry(s.to_vec()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(poly);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&poly);
                    e.insert(sum);
                }
            }
        }
    }
    for (mode, &b) in f.angle_part().iter() {
        let poly = CoefficientPolynomial::constant(dim, b);
        match bands.entry(mode.entries().to_vec()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(poly);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&poly);
                e.insert(sum);
            }
        }
    }
    Ok(ShiftOperator::from_bands(dim, bands))
}

/// The diagonal action operator: eigenvalue n_k + ε_k − λ_k on the basis
/// vector with label n.
pub fn action_operator<T: Real>(
    axis: usize,
    rep: &RepresentationParams<T>,
) -> Result<ShiftOperator<T>> {
    let dim = rep.dim();
    if axis >= dim {
        return Err(Error::AxisOutOfRange { axis, dim });
    }
    let offset = rep.epsilon_value(axis) - rep.lambda()[axis];
    let poly = CoefficientPolynomial::affine_in_axis(
        dim,
        axis,
        C::new(T::one(), T::zero()),
        C::new(offset, T::zero()),
    );
    Ok(ShiftOperator::from_bands(dim, [(vec![0; dim], poly)]))
}

/// [f̂, ĝ] + i·({f,g})^. The Dirac condition makes every band polynomial of
/// the result vanish; this is an exact algebraic check.
pub fn dirac_residual<T: Real>(
    f: &AffineObservable<T>,
    g: &AffineObservable<T>,
    rep: &RepresentationParams<T>,
) -> Result<ShiftOperator<T>> {
    let fq = quantize_affine(f, rep)?;
    let gq = quantize_affine(g, rep)?;
    let bracket = quantize_affine(&f.poisson_bracket(g)?, rep)?;
    fq.commutator(&gq)?.add(&bracket.scale(imag_unit::<T>()))
}

/// Residual of the gauge-conjugation identity
/// M_d ∘ rep_λ(f) ∘ M_{−d} − rep_{λ+d}(f), which vanishes for integer d.
pub fn gauge_intertwine_check<T: Real>(
    f: &AffineObservable<T>,
    rep: &RepresentationParams<T>,
    d: &[i64],
) -> Result<ShiftOperator<T>> {
    let dim = rep.dim();
    if d.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: d.len(),
        });
    }
    let m_d = ShiftOperator::pure_phase(&LatticeIndex(d.to_vec()));
    let m_neg = ShiftOperator::pure_phase(&LatticeIndex(d.iter().map(|x| -x).collect()));
    let conjugated = m_d.compose(&quantize_affine(f, rep)?)?.compose(&m_neg)?;
    let shifted = quantize_affine(f, &rep.gauge_shifted(d))?;
    conjugated.sub(&shifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::LatticeIndex;
    use crate::poisson::AffineObservable;

    type Op = ShiftOperator<f64>;
    type Obs = AffineObservable<f64>;
    type Poly = CoefficientPolynomial<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn rep(lambda: Vec<f64>) -> RepresentationParams<f64> {
        RepresentationParams::with_lambda(lambda)
    }

    #[allow(clippy::needless_range_loop)] // k is an axis index used in several roles
    /// Test-only oracle: apply the first-order operator
    /// −i a^k ∂_k − (i/2) ∂_k a^k − λ_k a^k + b
    /// to a state through Fourier-series arithmetic only (valid at ε = 0).
    fn apply_via_series(
        f: &Obs,
        lambda: &[f64],
        state: &crate::fourier::FourierSeries<f64>,
    ) -> crate::fourier::FourierSeries<f64> {
        let dim = f.dim();
        let mut out = crate::fourier::FourierSeries::zero(dim);
        for k in 0..dim {
            let ak = f.action_coefficient(k);
            let term1 = ak
                .convolve_mul(&state.angle_derivative(k).unwrap())
                .unwrap()
                .scale(c(0.0, -1.0));
            let term2 = ak
                .angle_derivative(k)
                .unwrap()
                .convolve_mul(state)
                .unwrap()
                .scale(c(0.0, -0.5));
            let term3 = ak.convolve_mul(state).unwrap().scale(c(-lambda[k], 0.0));
            out = out.add(&term1).unwrap().add(&term2).unwrap().add(&term3).unwrap();
        }
        out.add(&f.angle_part().convolve_mul(state).unwrap()).unwrap()
    }

    #[test]
    fn action_quantizes_to_shifted_label() {
        let r = rep(vec![0.25]);
        let op = quantize_affine(&Obs::action(1, 0).unwrap(), &r).unwrap();
        assert_eq!(op.band_count(), 1);
        let p = op.band(&[0]);
        assert_eq!(p.coeff(&[1]), c(1.0, 0.0));
        assert_eq!(p.coeff(&[0]), c(-0.25, 0.0));
        // Eigenvalue at label 2 is 2 − ¼.
        assert_eq!(p.eval_at_label(&[2]), c(1.75, 0.0));
    }

    #[test]
    fn pure_phase_quantizes_to_unit_band() {
        let r = rep(vec![0.7]);
        let f = Obs::angle_function(crate::fourier::FourierSeries::mode(
            LatticeIndex(vec![3]),
            c(1.0, 0.0),
        ));
        let op = quantize_affine(&f, &r).unwrap();
        assert_eq!(op.band_count(), 1);
        assert_eq!(op.band(&[3]).coeff(&[0]), c(1.0, 0.0));
    }

    #[test]
    fn trig_action_bands() {
        // cosφ·I at λ=ε=0: bands ±1 carry ½(n ± ½).
        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::zero(1),
        )
        .unwrap();
        let op = quantize_affine(&f, &rep(vec![0.0])).unwrap();
        let plus = op.band(&[1]);
        assert_eq!(plus.coeff(&[1]), c(0.5, 0.0));
        assert_eq!(plus.coeff(&[0]), c(0.25, 0.0));
        let minus = op.band(&[-1]);
        assert_eq!(minus.coeff(&[1]), c(0.5, 0.0));
        assert_eq!(minus.coeff(&[0]), c(-0.25, 0.0));
    }

    #[test]
    fn band_application_matches_series_oracle() {
        // The band polynomials must reproduce the first-order differential
        // operator applied through plain Fourier arithmetic (ε = 0).
        let lambda = vec![0.3];
        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::sine(LatticeIndex(vec![2])),
        )
        .unwrap();
        let op = quantize_affine(&f, &rep(lambda.clone())).unwrap();
        for n in -3..=3i64 {
            let basis =
                crate::fourier::FourierSeries::mode(LatticeIndex(vec![n]), c(1.0, 0.0));
            let via_series = apply_via_series(&f, &lambda, &basis);
            let via_bands = op.apply_to_series(&basis).unwrap();
            let diff = via_series.sub(&via_bands).unwrap();
            assert!(diff.max_abs_coeff() < 1e-13, "label {n}");
        }
    }

    #[test]
    fn compose_matches_band_formula() {
        let r = rep(vec![0.0]);
        let action = action_operator(0, &r).unwrap();
        let sq = action.compose(&action).unwrap();
        assert_eq!(sq.band_count(), 1);
        let p = sq.band(&[0]);
        assert_eq!(p.coeff(&[2]), c(1.0, 0.0));
        assert!(p.coeff(&[1]).norm() < 1e-14);
        assert!(p.coeff(&[0]).norm() < 1e-14);

        let m1 = Op::pure_phase(&LatticeIndex(vec![1]));
        let m_neg = Op::pure_phase(&LatticeIndex(vec![-1]));
        let id = m1.compose(&m_neg).unwrap();
        assert!(id.sub(&Op::identity(1)).unwrap().is_zero(1e-14));

        // Î M₁ − M₁ Î = M₁.
        let comm = action.commutator(&m1).unwrap();
        assert!(comm.sub(&m1).unwrap().is_zero(1e-14));
    }

    #[test]
    fn commutator_basics() {
        let r2 = RepresentationParams::with_lambda(vec![0.1, 0.9]);
        let i1 = action_operator(0, &r2).unwrap();
        let i2 = action_operator(1, &r2).unwrap();
        assert!(i1.commutator(&i2).unwrap().is_zero(1e-14));

        let ma = Op::pure_phase(&LatticeIndex(vec![2, -1]));
        let mb = Op::pure_phase(&LatticeIndex(vec![0, 3]));
        assert!(ma.commutator(&mb).unwrap().is_zero(1e-14));
    }

    #[test]
    fn dirac_residual_action_phase() {
        // {I, e^{iφ}} = i e^{iφ}; the commutator reproduces −i times its
        // quantization, i.e. [Î, M₁] = M₁.
        let r = rep(vec![0.45]);
        let f = Obs::action(1, 0).unwrap();
        let g = Obs::angle_function(crate::fourier::FourierSeries::mode(
            LatticeIndex(vec![1]),
            c(1.0, 0.0),
        ));
        assert!(dirac_residual(&f, &g, &r).unwrap().is_zero(1e-14));
        assert!(dirac_residual(&f, &f, &r).unwrap().is_zero(1e-14));
    }

    #[test]
    fn adjoint_rules() {
        let m = Op::pure_phase(&LatticeIndex(vec![2]));
        let expect = Op::pure_phase(&LatticeIndex(vec![-2]));
        assert!(m.adjoint().sub(&expect).unwrap().is_zero(1e-14));

        let r = rep(vec![0.6]);
        let a = action_operator(0, &r).unwrap();
        assert!(a.adjoint().sub(&a).unwrap().is_zero(1e-14));
    }

    #[test]
    fn adjoint_is_antihomomorphism() {
        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::sine(LatticeIndex(vec![1])),
        )
        .unwrap();
        let g = Obs::new(
            vec![crate::fourier::FourierSeries::sine(LatticeIndex(vec![2]))],
            crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1])),
        )
        .unwrap();
        let r = rep(vec![0.2]);
        let p = quantize_affine(&f, &r).unwrap();
        let q = quantize_affine(&g, &r).unwrap();
        let lhs = p.compose(&q).unwrap().adjoint();
        let rhs = q.adjoint().compose(&p.adjoint()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero(1e-13));
        // Involution.
        assert!(p.adjoint().adjoint().sub(&p).unwrap().is_zero(1e-14));
    }

    #[test]
    fn action_operator_with_twist() {
        let r = RepresentationParams::new(vec![0.3], vec![Twist::Half]).unwrap();
        let op = action_operator(0, &r).unwrap();
        // Eigenvalue n − λ + ½.
        assert_eq!(op.band(&[0]).eval_at_label(&[2]), c(2.2, 0.0));
    }

    #[test]
    fn gauge_conjugation_shifts_lambda() {
        let r = rep(vec![0.3]);
        let f = Obs::action(1, 0).unwrap();
        assert!(gauge_intertwine_check(&f, &r, &[1]).unwrap().is_zero(1e-14));
        assert!(gauge_intertwine_check(&f, &r, &[0]).unwrap().is_zero(1e-14));

        let g = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::sine(LatticeIndex(vec![1])),
        )
        .unwrap();
        assert!(gauge_intertwine_check(&g, &r, &[-2]).unwrap().is_zero(1e-13));
    }

    #[test]
    fn twist_reduction_gives_identical_bands() {
        let r = RepresentationParams::new(vec![0.0], vec![Twist::Half]).unwrap();
        let reduced = r.twist_reduce();
        assert_eq!(reduced.lambda(), &[-0.5]);

        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::sine(LatticeIndex(vec![2])),
        )
        .unwrap();
        let original = quantize_affine(&f, &r).unwrap();
        let folded = quantize_affine(&f, &reduced).unwrap();
        assert!(original.sub(&folded).unwrap().is_zero(1e-15));

        // Trivial twist is a fixed point.
        let r0 = rep(vec![0.2]);
        assert_eq!(r0.twist_reduce(), r0);
    }

    #[test]
    fn spectral_equivalence_witness() {
        let tol = 1e-9;
        let a = rep(vec![0.3]);
        let b = rep(vec![2.3]);
        assert!(a.spectrally_equivalent(&b, tol));
        let c_ = rep(vec![0.4]);
        assert!(!a.spectrally_equivalent(&c_, tol));
        // Twist by ½ matches a λ shifted by ½.
        let half = RepresentationParams::new(vec![0.3], vec![Twist::Half]).unwrap();
        let shifted = rep(vec![-0.2]);
        assert!(half.spectrally_equivalent(&shifted, tol));
    }

    #[test]
    fn commutator_of_affine_is_affine_in_labels() {
        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::zero(1),
        )
        .unwrap();
        let g = Obs::new(
            vec![crate::fourier::FourierSeries::sine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::zero(1),
        )
        .unwrap();
        let r = rep(vec![0.15]);
        let p = quantize_affine(&f, &r).unwrap();
        let q = quantize_affine(&g, &r).unwrap();
        let comm = p.commutator(&q).unwrap();
        assert!(comm.degree() <= 1, "quadratic label terms must cancel");
    }

    #[test]
    fn polynomial_shift_is_exact() {
        // (n+2)² expanded: n² + 4n + 4.
        let p = Poly::from_terms(1, [(vec![2], c(1.0, 0.0))]);
        let q = p.shift_arg(&[2]);
        assert_eq!(q.coeff(&[2]), c(1.0, 0.0));
        assert_eq!(q.coeff(&[1]), c(4.0, 0.0));
        assert_eq!(q.coeff(&[0]), c(4.0, 0.0));
    }

    #[test]
    fn shift_operator_records_round_trip() {
        let f = Obs::new(
            vec![crate::fourier::FourierSeries::cosine(LatticeIndex(vec![1]))],
            crate::fourier::FourierSeries::sine(LatticeIndex(vec![2])),
        )
        .unwrap();
        let op = quantize_affine(&f, &rep(vec![0.3])).unwrap();
        let records = op.to_records();
        let back = Op::from_records(1, &records).unwrap();
        assert!(op.sub(&back).unwrap().is_zero(1e-15));
    }
}
