//! Kostant–Souriau prequantization on the full annulus.
//!
//! The symplectic form Ω = dI_k∧dφ^k is exact, so the prequantum bundle is
//! the trivial line bundle; a connection in the admissible family is fixed by
//! m real parameters λ and has potential θ = (I_k + λ_k) dφ^k. Its curvature
//! satisfies dθ = Ω for every λ, which is the prequantization condition.
//!
//! The prequantum operator of an observable f acts on symbolic sections s
//! (action-polynomial symbols) as
//!
//! ```text
//! f̂ s = −i {f, s} + (f − (I_k + λ_k) ∂f/∂I_k) s ,
//! ```
//!
//! and satisfies the Dirac condition [f̂, ĝ] = −i {f,g}^ exactly. Only these
//! symbolic operator identities are checked at this level: the prequantum
//! Hilbert structure is discarded because polarized sections cannot have
//! compact support in the actions.
//!
//! Connection classes with integer-shifted λ are gauge conjugated; the class
//! representative in [0,1)^m is reported by
//! [`ConnectionParams::class_representative`], while every operation accepts
//! arbitrary real λ.

use crate::error::Result;
use crate::poisson::FourierTaylor;
use crate::scalar::{imag_unit, Real, C};
use std::collections::BTreeMap;

/// Connection class parameters λ ∈ R^m.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionParams<T: Real> {
    lambda: Vec<T>,
}

impl<T: Real> ConnectionParams<T> {
    pub fn new(lambda: Vec<T>) -> Self {
        assert!(
            lambda.iter().all(|l| l.is_finite()),
            "connection parameters must be finite"
        );
        ConnectionParams { lambda }
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    /// The gauge-class representative with every entry in [0,1).
    pub fn class_representative(&self) -> Self {
        ConnectionParams {
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
        }
    }
}

/// A one-form with action-polynomial coefficients:
/// Σ_k action[k] dI_k + angle[k] dφ^k.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm<T: Real> {
    pub action: Vec<FourierTaylor<T>>,
    pub angle: Vec<FourierTaylor<T>>,
}

/// A two-form over the basis {dI_j∧dI_k, dI_j∧dφ^k, dφ^j∧dφ^k} with
/// action-polynomial coefficients.
///
/// Same-kind blocks are stored only for j < k, which makes antisymmetry
/// structural rather than a runtime invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm<T: Real> {
    dim: usize,
    /// Coefficient of dI_j ∧ dI_k, j < k.
    action_action: BTreeMap<(usize, usize), FourierTaylor<T>>,
    /// Coefficient of dI_j ∧ dφ^k, any (j,k).
    action_angle: BTreeMap<(usize, usize), FourierTaylor<T>>,
    /// Coefficient of dφ^j ∧ dφ^k, j < k.
    angle_angle: BTreeMap<(usize, usize), FourierTaylor<T>>,
}

impl<T: Real> TwoForm<T> {
    pub fn zero(dim: usize) -> Self {
        TwoForm {
            dim,
            action_action: BTreeMap::new(),
            action_angle: BTreeMap::new(),
            angle_angle: BTreeMap::new(),
        }
    }

    /// Ω = dI_k ∧ dφ^k.
    pub fn symplectic(dim: usize) -> Self {
        let mut form = Self::zero(dim);
        for k in 0..dim {
            form.action_angle.insert(
                (k, k),
                FourierTaylor::constant(dim, C::new(T::one(), T::zero())),
            );
        }
        form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action_action(&self, j: usize, k: usize) -> FourierTaylor<T> {
        debug_assert!(j < k);
        self.action_action
            .get(&(j, k))
            .cloned()
            .unwrap_or_else(|| FourierTaylor::zero(self.dim))
    }

    pub fn action_angle(&self, j: usize, k: usize) -> FourierTaylor<T> {
        self.action_angle
            .get(&(j, k))
            .cloned()
            .unwrap_or_else(|| FourierTaylor::zero(self.dim))
    }

    pub fn angle_angle(&self, j: usize, k: usize) -> FourierTaylor<T> {
        debug_assert!(j < k);
        self.angle_angle
            .get(&(j, k))
            .cloned()
            .unwrap_or_else(|| FourierTaylor::zero(self.dim))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for table in [0usize, 1, 2] {
            let (mine, theirs) = match table {
                0 => (&self.action_action, &other.action_action),
                1 => (&self.action_angle, &other.action_angle),
                _ => (&self.angle_angle, &other.angle_angle),
            };
            let keys: std::collections::BTreeSet<_> =
                mine.keys().chain(theirs.keys()).copied().collect();
            for key in keys {
                let zero = FourierTaylor::zero(self.dim);
                let a = mine.get(&key).unwrap_or(&zero);
                let b = theirs.get(&key).unwrap_or(&zero);
                let d = a.sub(b)?;
                if !d.is_empty() {
                    match table {
                        0 => out.action_action.insert(key, d),
                        1 => out.action_angle.insert(key, d),
                        _ => out.angle_angle.insert(key, d),
                    };
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.action_action
            .values()
            .chain(self.action_angle.values())
            .chain(self.angle_angle.values())
            .map(|t| t.max_abs_coeff())
            .fold(T::zero(), T::max)
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.max_abs_coeff() <= tol
    }
}

/// θ = (I_k + λ_k) dφ^k, the potential of the connection in class λ.
pub fn connection_potential<T: Real>(params: &ConnectionParams<T>) -> OneForm<T> {
    let dim = params.dim();
    let mut angle = Vec::with_capacity(dim);
    for k in 0..dim {
        let ik = FourierTaylor::action_monomial(dim, unit_degree(dim, k))
            .expect("degree-1 monomial is below any cap");
        let shift = FourierTaylor::constant(dim, C::new(params.lambda[k], T::zero()));
        angle.push(ik.add(&shift).expect("matching dimensions"));
    }
    OneForm {
        action: (0..dim).map(|_| FourierTaylor::zero(dim)).collect(),
        angle,
    }
}

fn unit_degree(dim: usize, axis: usize) -> Vec<u32> {
    let mut alpha = vec![0u32; dim];
    alpha[axis] = 1;
    alpha
}

/// Exterior derivative of a one-form.
pub fn exterior_derivative<T: Real>(form: &OneForm<T>) -> Result<TwoForm<T>> {
    let dim = form.action.len();
    let mut out = TwoForm::zero(dim);
    for j in 0..dim {
        for k in 0..dim {
            // dI_j ∧ dφ^k coefficient: ∂_{I_j} Q_k − ∂_{φ^k} P_j.
            let c = form.angle[k]
                .action_derivative(j)?
                .sub(&form.action[j].angle_derivative(k)?)?;
            if !c.is_empty() {
                out.action_angle.insert((j, k), c);
            }
            if j < k {
                let aa = form.action[k]
                    .action_derivative(j)?
                    .sub(&form.action[j].action_derivative(k)?)?;
                if !aa.is_empty() {
                    out.action_action.insert((j, k), aa);
                }
                let pp = form.angle[k]
                    .angle_derivative(j)?
                    .sub(&form.angle[j].angle_derivative(k)?)?;
                if !pp.is_empty() {
                    out.angle_angle.insert((j, k), pp);
                }
            }
        }
    }
    Ok(out)
}

/// d(connection potential) − Ω. The prequantization condition makes this the
/// zero two-form for every λ.
pub fn curvature_residual<T: Real>(params: &ConnectionParams<T>) -> Result<TwoForm<T>> {
    let theta = connection_potential(params);
    let d_theta = exterior_derivative(&theta)?;
    d_theta.sub(&TwoForm::symplectic(params.dim()))
}

/// The prequantum operator of f applied to the section s:
/// −i{f,s} + (f − (I_k+λ_k) ∂f/∂I_k)·s.
pub fn prequantum_apply<T: Real>(
    f: &FourierTaylor<T>,
    params: &ConnectionParams<T>,
    section: &FourierTaylor<T>,
) -> Result<FourierTaylor<T>> {
    let dim = f.dim();
    let mut multiplier = f.clone();
    for k in 0..dim {
        let df = f.action_derivative(k)?;
        let i_df = df.mul_action(k)?;
        let l_df = df.scale(C::new(params.lambda[k], T::zero()));
        multiplier = multiplier.sub(&i_df)?.sub(&l_df)?;
    }
    let transport = f.poisson_bracket(section)?.scale(-imag_unit::<T>());
    transport.add(&multiplier.mul(section)?)
}

/// ([f̂, ĝ] + i·{f,g}^) s. The Dirac condition makes this vanish identically.
pub fn prequant_dirac_residual<T: Real>(
    f: &FourierTaylor<T>,
    g: &FourierTaylor<T>,
    params: &ConnectionParams<T>,
    section: &FourierTaylor<T>,
) -> Result<FourierTaylor<T>> {
    let fg = prequantum_apply(f, params, &prequantum_apply(g, params, section)?)?;
    let gf = prequantum_apply(g, params, &prequantum_apply(f, params, section)?)?;
    let bracket = f.poisson_bracket(g)?;
    let bracket_applied =
        prequantum_apply(&bracket, params, section)?.scale(imag_unit::<T>());
    fg.sub(&gf)?.add(&bracket_applied)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{FourierSeries, LatticeIndex};

    type Taylor = FourierTaylor<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn potential_reads_off_lambda() {
        let theta = connection_potential(&ConnectionParams::new(vec![0.0]));
        assert!(theta.action[0].is_empty());
        assert_eq!(theta.angle[0], Taylor::action_monomial(1, vec![1]).unwrap());

        let theta = connection_potential(&ConnectionParams::new(vec![0.3]));
        assert_eq!(theta.angle[0].term(&[0]).coeff(&LatticeIndex::zero(1)), c(0.3, 0.0));
        assert_eq!(theta.angle[0].term(&[1]).coeff(&LatticeIndex::zero(1)), c(1.0, 0.0));

        let theta = connection_potential(&ConnectionParams::new(vec![0.5, 0.0]));
        assert_eq!(
            theta.angle[0].term(&[0, 0]).coeff(&LatticeIndex::zero(2)),
            c(0.5, 0.0)
        );
        assert!(theta.angle[1].term(&[0, 0]).is_empty());
        assert_eq!(
            theta.angle[1].term(&[0, 1]).coeff(&LatticeIndex::zero(2)),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn curvature_vanishes_for_any_lambda() {
        for lambda in [vec![0.0], vec![0.7]] {
            let r = curvature_residual(&ConnectionParams::new(lambda)).unwrap();
            assert!(r.is_zero(0.0));
        }
        let r = curvature_residual(&ConnectionParams::new(vec![1.25, -3.4, 0.9])).unwrap();
        assert!(r.is_zero(0.0));
    }

    #[test]
    fn class_representative_in_unit_cube() {
        let p = ConnectionParams::new(vec![1.25, -0.3, 2.0]);
        let rep = p.class_representative();
        let expect = [0.25, 0.7, 0.0];
        for (got, want) in rep.lambda().iter().zip(expect) {
            let want: f64 = want;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn action_prequantizes_to_shifted_derivative() {
        // f = I₁ acts as (−i ∂₁ − λ₁) s.
        let lambda = 0.4;
        let params = ConnectionParams::new(vec![lambda]);
        let f = Taylor::action_monomial(1, vec![1]).unwrap();

        let s = Taylor::from_series(FourierSeries::mode(LatticeIndex(vec![1]), c(1.0, 0.0)));
        let got = prequantum_apply(&f, &params, &s).unwrap();
        // (−i·i − λ) e^{iφ} = (1 − λ) e^{iφ}.
        let expected = s.scale(c(1.0 - lambda, 0.0));
        assert!(got.sub(&expected).unwrap().max_abs_coeff() < 1e-14);

        // Same phase carried by an action-degree-1 section.
        let s_deg1 = s.mul_action(0).unwrap();
        let got = prequantum_apply(&f, &params, &s_deg1).unwrap();
        let expected = s_deg1.scale(c(1.0 - lambda, 0.0));
        assert!(got.sub(&expected).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn constant_acts_by_multiplication() {
        let params = ConnectionParams::new(vec![0.9]);
        let f = Taylor::constant(1, c(2.5, 0.0));
        let s = Taylor::from_terms(
            1,
            [
                (vec![1], FourierSeries::cosine(LatticeIndex(vec![2]))),
                (vec![0], FourierSeries::sine(LatticeIndex(vec![1]))),
            ],
        )
        .unwrap();
        let got = prequantum_apply(&f, &params, &s).unwrap();
        assert!(got.sub(&s.scale(c(2.5, 0.0))).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn phase_prequantization_mixes_action_derivative() {
        // f = e^{iφ}: f̂ s = −e^{iφ} ∂s/∂I + e^{iφ} s. On s = I this is e^{iφ}(I − 1).
        let params = ConnectionParams::new(vec![0.0]);
        let phase = FourierSeries::mode(LatticeIndex(vec![1]), c(1.0, 0.0));
        let f = Taylor::from_series(phase.clone());
        let s = Taylor::action_monomial(1, vec![1]).unwrap();
        let got = prequantum_apply(&f, &params, &s).unwrap();
        let expected = Taylor::from_terms(
            1,
            [(vec![1], phase.clone()), (vec![0], phase.neg())],
        )
        .unwrap();
        assert!(got.sub(&expected).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn dirac_residual_basics() {
        let params = ConnectionParams::new(vec![0.35]);
        let i1 = Taylor::action_monomial(1, vec![1]).unwrap();
        let one = Taylor::constant(1, c(1.0, 0.0));
        let r = prequant_dirac_residual(&i1, &i1, &params, &one).unwrap();
        assert!(r.max_abs_coeff() < 1e-14);

        let phase = Taylor::from_series(FourierSeries::mode(LatticeIndex(vec![1]), c(1.0, 0.0)));
        let r = prequant_dirac_residual(&i1, &phase, &params, &one).unwrap();
        assert!(r.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn affine_observables_preserve_polarized_sections() {
        // Affine f keeps sections constant in the actions inside that
        // subspace; I² does not.
        let params = ConnectionParams::new(vec![0.2]);
        let affine = Taylor::from_terms(
            1,
            [
                (vec![1], FourierSeries::cosine(LatticeIndex(vec![1]))),
                (vec![0], FourierSeries::sine(LatticeIndex(vec![1]))),
            ],
        )
        .unwrap();
        let s = Taylor::from_series(FourierSeries::mode(LatticeIndex(vec![2]), c(1.0, 0.0)));
        let out = prequantum_apply(&affine, &params, &s).unwrap();
        assert_eq!(out.degree(), 0);

        let i_sq = Taylor::action_monomial(1, vec![2]).unwrap();
        let out = prequantum_apply(&i_sq, &params, &s).unwrap();
        assert!(out.degree() > 0);
    }

    #[test]
    fn prequantum_apply_is_linear() {
        let params = ConnectionParams::new(vec![0.1]);
        let f = Taylor::from_terms(
            1,
            [(vec![1], FourierSeries::cosine(LatticeIndex(vec![1])))],
        )
        .unwrap();
        let g = Taylor::from_series(FourierSeries::sine(LatticeIndex(vec![2])));
        let s = Taylor::from_series(FourierSeries::cosine(LatticeIndex(vec![1])));
        let t = Taylor::action_monomial(1, vec![1]).unwrap();

        // Linear in the observable.
        let sum = prequantum_apply(&f.add(&g).unwrap(), &params, &s).unwrap();
        let parts = prequantum_apply(&f, &params, &s)
            .unwrap()
            .add(&prequantum_apply(&g, &params, &s).unwrap())
            .unwrap();
        assert!(sum.sub(&parts).unwrap().max_abs_coeff() < 1e-14);

        // Linear in the section.
        let sum = prequantum_apply(&f, &params, &s.add(&t).unwrap()).unwrap();
        let parts = prequantum_apply(&f, &params, &s)
            .unwrap()
            .add(&prequantum_apply(&f, &params, &t).unwrap())
            .unwrap();
        assert!(sum.sub(&parts).unwrap().max_abs_coeff() < 1e-14);
    }
}
