//! Time-dependent-parameter perturbations and the holonomy (Berry) operator.
//!
//! A Hamiltonian independent of the actions of an index block a admits the
//! perturbation Δ = Λ^a_β(ξ, φ^b) ξ̇^β I_a driven by parameters ξ(t). Each
//! instant quantizes to the band operator
//!
//! ```text
//! Δ̂ = −(i Λ^a_β ∂_a + (i/2) ∂_a Λ^a_β + λ_a Λ^a_β) ξ̇^β ,
//! ```
//!
//! which commutes with the quantized Hamiltonian, so the evolution factors
//! into the dynamic part U₁ (diagonal phases of H) and the geometric part U₂,
//! a path-ordered exponential along the parameter curve. For closed curves U₂
//! is the Berry factor.
//!
//! U₂ is computed on a truncated hypercube of basis labels as an ordered
//! product of midpoint-sampled step exponentials (second order in the step
//! size). Truncation drops outflow across the box boundary; assertions about
//! accuracy are made only on interior labels, and the band margin of the box
//! must dominate every applied operator's band width. Coefficient tables are
//! supplied per path node and interpolated linearly in time between nodes.

use crate::error::{Error, Result};
use crate::expm::{expm, one_norm};
use crate::fourier::FourierSeries;
use crate::poisson::AffineObservable;
use crate::representation::{CoefficientPolynomial, RepresentationParams, ShiftOperator};
use crate::scalar::{Real, C};
use crate::spectra::{lattice_window, quantize_hamiltonian, HamiltonianSpec};
use ndarray::Array2;
use std::collections::BTreeMap;

/// Λ coefficient tables at one parameter point: `tables[a][β]` is the series
/// in the block angles multiplying ξ̇^β I_{a}.
pub type LambdaTables<T> = Vec<Vec<FourierSeries<T>>>;

/// Which actions the unperturbed Hamiltonian is independent of, and how many
/// parameters drive the perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec<T: Real> {
    dim: usize,
    a_indices: Vec<usize>,
    n_params: usize,
    reality_tol: T,
}

impl<T: Real> PerturbationSpec<T> {
    pub fn new(dim: usize, mut a_indices: Vec<usize>, n_params: usize) -> Result<Self> {
        a_indices.sort_unstable();
        a_indices.dedup();
        if a_indices.is_empty() || n_params == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for &axis in &a_indices {
            if axis >= dim {
                return Err(Error::AxisOutOfRange { axis, dim });
            }
        }
        Ok(PerturbationSpec {
            dim,
            a_indices,
            n_params,
            reality_tol: T::of(1e-12),
        })
    }

    pub fn with_reality_tol(mut self, tol: T) -> Self {
        self.reality_tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a_indices(&self) -> &[usize] {
        &self.a_indices
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn block_size(&self) -> usize {
        self.a_indices.len()
    }

    /// Tables must be real, block-shaped, and supported on block angles only.
    pub fn validate_tables(&self, tables: &LambdaTables<T>) -> Result<()> {
        if tables.len() != self.block_size() {
            return Err(Error::DimensionMismatch {
                expected: self.block_size(),
                found: tables.len(),
            });
        }
        for row in tables {
            if row.len() != self.n_params {
                return Err(Error::DimensionMismatch {
                    expected: self.n_params,
                    found: row.len(),
                });
            }
            for series in row {
                if series.dim() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        found: series.dim(),
                    });
                }
                if !series.is_real(self.reality_tol) {
                    return Err(Error::NonRealCoefficients);
                }
                if !series.supported_within(&self.a_indices) {
                    let axis = series
                        .iter()
                        .flat_map(|(mode, _)| {
                            mode.entries()
                                .iter()
                                .enumerate()
                                .filter(|(k, &n)| n != 0 && !self.a_indices.contains(k))
                                .map(|(k, _)| k)
                                .collect::<Vec<_>>()
                        })
                        .next()
                        .unwrap_or(0);
                    return Err(Error::AxisLeakage { axis });
                }
            }
        }
        Ok(())
    }

    pub fn validate_path(&self, path: &ParameterPath<T>) -> Result<()> {
        for node in path.nodes() {
            if node.xi.len() != self.n_params {
                return Err(Error::DimensionMismatch {
                    expected: self.n_params,
                    found: node.xi.len(),
                });
            }
            self.validate_tables(&node.lambda)?;
        }
        Ok(())
    }

    /// Σ_β Λ^a_β v^β per block axis.
    pub fn combined_series(
        &self,
        tables: &LambdaTables<T>,
        velocity: &[T],
    ) -> Result<Vec<FourierSeries<T>>> {
        if velocity.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                found: velocity.len(),
            });
        }
        let mut out = Vec::with_capacity(self.block_size());
        for row in tables {
            let mut acc = FourierSeries::zero(self.dim);
            for (series, &v) in row.iter().zip(velocity) {
                acc = acc.add(&series.scale(C::new(v, T::zero())))?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// The induced affine observable Σ_β Λ^a_β v^β I_a (zero angle part).
    /// Quantizing it is the second construction route for the perturbation
    /// operator.
    pub fn observable(
        &self,
        tables: &LambdaTables<T>,
        velocity: &[T],
    ) -> Result<AffineObservable<T>> {
        self.validate_tables(tables)?;
        let combined = self.combined_series(tables, velocity)?;
        let mut a: Vec<FourierSeries<T>> =
            (0..self.dim).map(|_| FourierSeries::zero(self.dim)).collect();
        for (pos, &axis) in self.a_indices.iter().enumerate() {
            a[axis] = combined[pos].clone();
        }
        AffineObservable::new(a, FourierSeries::zero(self.dim))
    }
}

/// One sampled point of the parameter curve with its coefficient tables.
#[derive(Debug, Clone, PartialEq)]
pub struct PathNode<T: Real> {
    pub t: T,
    pub xi: Vec<T>,
    pub lambda: LambdaTables<T>,
}

/// A discretized curve in parameter space. ξ and the Λ tables are linearly
/// interpolated between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath<T: Real> {
    nodes: Vec<PathNode<T>>,
    closed: bool,
}

impl<T: Real> ParameterPath<T> {
    pub fn new(nodes: Vec<PathNode<T>>, closed: bool) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::PathTooShort);
        }
        let p = nodes[0].xi.len();
        for (i, node) in nodes.iter().enumerate() {
            if node.xi.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    found: node.xi.len(),
                });
            }
            if i > 0 && node.t <= nodes[i - 1].t {
                return Err(Error::PathNotIncreasing { node: i });
            }
        }
        if closed {
            let first = &nodes[0].xi;
            let last = &nodes[nodes.len() - 1].xi;
            let tol = T::of(1e-12);
            if first
                .iter()
                .zip(last)
                .any(|(&a, &b)| (a - b).abs() > tol)
            {
                return Err(Error::PathNotClosed);
            }
        }
        Ok(ParameterPath { nodes, closed })
    }

    pub fn nodes(&self) -> &[PathNode<T>] {
        &self.nodes
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn start_time(&self) -> T {
        self.nodes[0].t
    }

    pub fn end_time(&self) -> T {
        self.nodes[self.nodes.len() - 1].t
    }

    /// Linear interpolation of ξ and the tables at a time inside the path.
    pub fn sample_at(&self, t: T) -> Result<(Vec<T>, LambdaTables<T>)> {
        let t = t
            .max(self.start_time())
            .min(self.end_time());
        let mut seg = self.nodes.len() - 2;
        for i in 0..self.nodes.len() - 1 {
            if t <= self.nodes[i + 1].t {
                seg = i;
                break;
            }
        }
        let (a, b) = (&self.nodes[seg], &self.nodes[seg + 1]);
        let u = (t - a.t) / (b.t - a.t);
        Ok((lerp_vec(&a.xi, &b.xi, u), lerp_tables(&a.lambda, &b.lambda, u)?))
    }

    /// The same curve traversed backwards over the same time interval.
    pub fn reversed(&self) -> Self {
        let t0 = self.start_time();
        let t1 = self.end_time();
        let mut nodes: Vec<PathNode<T>> = self
            .nodes
            .iter()
            .rev()
            .map(|n| PathNode {
                t: t0 + (t1 - n.t),
                xi: n.xi.clone(),
                lambda: n.lambda.clone(),
            })
            .collect();
        // Guard against rounding in the time reflection.
        nodes[0].t = t0;
        let last = nodes.len() - 1;
        nodes[last].t = t1;
        ParameterPath {
            nodes,
            closed: self.closed,
        }
    }

    /// Redistribute the discretization of the same oriented curve through a
    /// strictly monotone time change w: [0,1] → [0,1] with w(0)=0, w(1)=1.
    ///
    /// Every original breakpoint is kept (the geometric curve is unchanged);
    /// each segment additionally receives `refine`−1 interior nodes at the
    /// warped fractions w(k/refine), sampled by the segment's own linear
    /// interpolation. The evolution integrates per segment, so the new
    /// partition shifts every sub-step midpoint — which is the only way a
    /// time change can affect a parametrization-invariant line integral.
    pub fn reparametrized(&self, warp: impl Fn(T) -> T, refine: usize) -> Result<Self> {
        if refine == 0 {
            return Err(Error::StepCount);
        }
        let tol = T::of(1e-9);
        if warp(T::zero()).abs() > tol || (warp(T::one()) - T::one()).abs() > tol {
            return Err(Error::NonMonotoneWarp);
        }
        let mut fractions = Vec::with_capacity(refine + 1);
        for k in 0..=refine {
            let u = warp(T::of(k as f64) / T::of(refine as f64))
                .max(T::zero())
                .min(T::one());
            if let Some(&prev) = fractions.last() {
                if u <= prev {
                    return Err(Error::NonMonotoneWarp);
                }
            }
            fractions.push(u);
        }

        let mut nodes = Vec::with_capacity(self.segments() * refine + 1);
        for seg in 0..self.segments() {
            let a = &self.nodes[seg];
            let b = &self.nodes[seg + 1];
            for (k, &u) in fractions.iter().enumerate() {
                if k == refine && seg + 1 < self.segments() {
                    break;
                }
                let node = if k == 0 {
                    a.clone()
                } else if k == refine {
                    b.clone()
                } else {
                    PathNode {
                        t: a.t + (b.t - a.t) * u,
                        xi: lerp_vec(&a.xi, &b.xi, u),
                        lambda: lerp_tables(&a.lambda, &b.lambda, u)?,
                    }
                };
                nodes.push(node);
            }
        }
        ParameterPath::new(nodes, self.closed)
    }

    /// True when every node table involves no angle dependence (mode 0 only).
    pub fn angle_independent(&self) -> bool {
        self.nodes.iter().all(|node| {
            node.lambda
                .iter()
                .flatten()
                .all(|s| s.support_radius() == 0)
        })
    }
}

fn lerp_vec<T: Real>(a: &[T], b: &[T], u: T) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x + (y - x) * u)
        .collect()
}

fn lerp_tables<T: Real>(
    a: &LambdaTables<T>,
    b: &LambdaTables<T>,
    u: T,
) -> Result<LambdaTables<T>> {
    let mut out = Vec::with_capacity(a.len());
    for (ra, rb) in a.iter().zip(b) {
        let mut row = Vec::with_capacity(ra.len());
        for (sa, sb) in ra.iter().zip(rb) {
            let one_minus = C::new(T::one() - u, T::zero());
            let w = C::new(u, T::zero());
            row.push(sa.scale(one_minus).add(&sb.scale(w))?);
        }
        out.push(row);
    }
    Ok(out)
}

/// Finite-dimensional carrier for the evolution: the hypercube of basis
/// labels max_k |n_k| ≤ radius. Amplitude leaving the box is dropped;
/// `margin` is the band width the box is guaranteed to dominate, and labels
/// within `margin`-scaled reach of the boundary are excluded from accuracy
/// assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationBox {
    dim: usize,
    radius: i64,
    margin: i64,
}

impl TruncationBox {
    pub fn new(dim: usize, radius: i64, margin: i64) -> Result<Self> {
        if margin < 0 || margin > radius {
            return Err(Error::MarginExceedsRadius { margin, radius });
        }
        Ok(TruncationBox {
            dim,
            radius,
            margin,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn margin(&self) -> i64 {
        self.margin
    }

    pub fn labels(&self) -> Vec<Vec<i64>> {
        lattice_window(self.dim, self.radius)
    }

    pub fn size(&self) -> usize {
        (2 * self.radius + 1).pow(self.dim as u32) as usize
    }

    pub fn is_interior(&self, label: &[i64], depth: i64) -> bool {
        label.iter().all(|&n| n.abs() <= self.radius - depth)
    }
}

/// Quantize the perturbation at one parameter point, assembled directly from
/// its three displayed terms (multiplications and the −i∂_a derivative):
/// the result must agree band-for-band with quantizing
/// [`PerturbationSpec::observable`].
pub fn quantize_perturbation<T: Real>(
    spec: &PerturbationSpec<T>,
    tables: &LambdaTables<T>,
    velocity: &[T],
    rep: &RepresentationParams<T>,
) -> Result<ShiftOperator<T>> {
    if rep.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: rep.dim(),
        });
    }
    spec.validate_tables(tables)?;
    let combined = spec.combined_series(tables, velocity)?;
    let dim = spec.dim();
    let half_i = C::new(T::zero(), T::of(0.5));
    let mut acc = ShiftOperator::zero(dim);
    for (pos, &axis) in spec.a_indices().iter().enumerate() {
        let lam_series = &combined[pos];
        if lam_series.is_empty() {
            continue;
        }
        // −i ∂_axis is diagonal with eigenvalue n_axis + ε_axis.
        let derivative = ShiftOperator::from_bands(
            dim,
            [(
                vec![0; dim],
                CoefficientPolynomial::affine_in_axis(
                    dim,
                    axis,
                    C::new(T::one(), T::zero()),
                    C::new(rep.epsilon_value(axis), T::zero()),
                ),
            )],
        );
        let transport = ShiftOperator::multiplication(lam_series).compose(&derivative)?;
        let divergence =
            ShiftOperator::multiplication(&lam_series.angle_derivative(axis)?.scale(-half_i));
        let connection = ShiftOperator::multiplication(
            &lam_series.scale(C::new(-rep.lambda()[axis], T::zero())),
        );
        acc = acc
            .add(&transport)?
            .add(&divergence)?
            .add(&connection)?;
    }
    Ok(acc)
}

/// Dense matrix of a band operator over the box labels: entry
/// (index(n+s), index(n)) = p_s(n), outflow dropped.
pub fn materialize<T: Real>(
    op: &ShiftOperator<T>,
    bounds: &TruncationBox,
) -> Result<Array2<C<T>>> {
    if op.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            found: op.dim(),
        });
    }
    for (shift, _) in op.bands() {
        if shift.iter().any(|s| s.abs() > bounds.margin()) {
            return Err(Error::MarginViolation {
                shift: shift.clone(),
                margin: bounds.margin(),
            });
        }
    }
    let labels = bounds.labels();
    let index: BTreeMap<&[i64], usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_slice(), i))
        .collect();
    let n = labels.len();
    let mut matrix = Array2::zeros((n, n));
    for (shift, poly) in op.bands() {
        for (col, label) in labels.iter().enumerate() {
            let target: Vec<i64> = label.iter().zip(shift).map(|(a, b)| a + b).collect();
            if let Some(&row) = index.get(target.as_slice()) {
                matrix[[row, col]] += poly.eval_at_label(label);
            }
        }
    }
    Ok(matrix)
}

/// The geometric evolution operator U₂: the ordered product over midpoint
/// sub-steps of exp(−i Δ̂(ξ_mid) Δξ_step), `steps` sub-steps per path
/// segment. For closed paths this is the Berry factor.
pub fn evolve_u2<T: Real>(
    spec: &PerturbationSpec<T>,
    path: &ParameterPath<T>,
    rep: &RepresentationParams<T>,
    bounds: &TruncationBox,
    steps: usize,
) -> Result<Array2<C<T>>> {
    if steps == 0 {
        return Err(Error::StepCount);
    }
    spec.validate_path(path)?;
    let tol = crate::expm::default_tol::<T>();
    let minus_i = C::new(T::zero(), -T::one());
    let mut u: Array2<C<T>> = Array2::eye(bounds.size());
    for seg in 0..path.segments() {
        let a = &path.nodes()[seg];
        let b = &path.nodes()[seg + 1];
        let dxi_step: Vec<T> = a
            .xi
            .iter()
            .zip(&b.xi)
            .map(|(&x, &y)| (y - x) / T::of(steps as f64))
            .collect();
        for j in 0..steps {
            let frac = (T::of(j as f64) + T::of(0.5)) / T::of(steps as f64);
            let tables = lerp_tables(&a.lambda, &b.lambda, frac)?;
            let op = quantize_perturbation(spec, &tables, &dxi_step, rep)?;
            let generator = materialize(&op, bounds)?;
            if one_norm(&generator).is_zero() {
                continue;
            }
            let step = expm(&generator.mapv(|x| x * minus_i), tol);
            u = step.dot(&u);
        }
    }
    if u.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(u)
}

/// The dynamic evolution operator U₁ = diag exp(−i H(n+ε−λ) t). H must not
/// depend on the perturbed action block.
pub fn evolve_u1<T: Real>(
    hamiltonian: &HamiltonianSpec<T>,
    a_indices: &[usize],
    rep: &RepresentationParams<T>,
    t: T,
    bounds: &TruncationBox,
) -> Result<Array2<C<T>>> {
    for &axis in a_indices {
        if hamiltonian.depends_on_axis(axis) {
            return Err(Error::HamiltonianDependsOnBlock { axis });
        }
    }
    let diag = quantize_hamiltonian(hamiltonian.clone(), rep.clone())?;
    let labels = bounds.labels();
    let mut matrix = Array2::zeros((labels.len(), labels.len()));
    for (i, label) in labels.iter().enumerate() {
        let value = diag.eigenvalue(label)?;
        matrix[[i, i]] = C::from_polar(T::one(), -value * t);
    }
    Ok(matrix)
}

/// Band-polynomial commutator of the enveloping-algebra form of H with the
/// perturbation operator at one parameter point. Vanishes exactly when H is
/// independent of the perturbed block.
pub fn commute_check<T: Real>(
    hamiltonian: &HamiltonianSpec<T>,
    spec: &PerturbationSpec<T>,
    tables: &LambdaTables<T>,
    velocity: &[T],
    rep: &RepresentationParams<T>,
) -> Result<ShiftOperator<T>> {
    for &axis in spec.a_indices() {
        if hamiltonian.depends_on_axis(axis) {
            return Err(Error::HamiltonianDependsOnBlock { axis });
        }
    }
    let h_op = quantize_hamiltonian(hamiltonian.clone(), rep.clone())?.to_shift_operator()?;
    let delta = quantize_perturbation(spec, tables, velocity, rep)?;
    h_op.commutator(&delta)
}

/// Deviation (entrywise 2-norm) between U₂ of the path and U₂ of the same
/// curve rediscretized through a monotone time change. The holonomy depends
/// only on the oriented curve, so the deviation tends to zero as steps grow.
pub fn reparametrize_check<T: Real>(
    spec: &PerturbationSpec<T>,
    path: &ParameterPath<T>,
    warp: impl Fn(T) -> T,
    rep: &RepresentationParams<T>,
    bounds: &TruncationBox,
    steps: usize,
    refine: usize,
) -> Result<T> {
    let direct = evolve_u2(spec, path, rep, bounds, steps)?;
    let resampled = path.reparametrized(warp, refine)?;
    let warped = evolve_u2(spec, &resampled, rep, bounds, steps)?;
    Ok(crate::expm::frobenius_norm(&(&direct - &warped)))
}

/// Diagonal closed form of U₂ for angle-independent tables:
/// exp(−i Σ_a (n_a + ε_a − λ_a) ∮ Λ^a_β dσ^β), with the line integral taken
/// by the trapezoid rule over the path nodes (exact for the piecewise-linear
/// node model). This is the independent oracle for the path-ordered product.
pub fn abelian_closed_form<T: Real>(
    spec: &PerturbationSpec<T>,
    path: &ParameterPath<T>,
    rep: &RepresentationParams<T>,
    bounds: &TruncationBox,
) -> Result<Array2<C<T>>> {
    if !path.angle_independent() {
        return Err(Error::NotAngleIndependent);
    }
    spec.validate_path(path)?;
    let zero_mode = crate::fourier::LatticeIndex::zero(spec.dim());
    let half = T::of(0.5);
    // ∮ Λ^a_β dσ^β per block axis.
    let mut winding = vec![T::zero(); spec.block_size()];
    for seg in 0..path.segments() {
        let a = &path.nodes()[seg];
        let b = &path.nodes()[seg + 1];
        for (pos, w) in winding.iter_mut().enumerate() {
            for beta in 0..spec.n_params() {
                let ca = a.lambda[pos][beta].coeff(&zero_mode).re;
                let cb = b.lambda[pos][beta].coeff(&zero_mode).re;
                let dxi = b.xi[beta] - a.xi[beta];
                *w += half * (ca + cb) * dxi;
            }
        }
    }
    let labels = bounds.labels();
    let mut matrix = Array2::zeros((labels.len(), labels.len()));
    for (i, label) in labels.iter().enumerate() {
        let mut phase = T::zero();
        for (pos, &axis) in spec.a_indices().iter().enumerate() {
            let nu = T::of_int(label[axis]) + rep.epsilon_value(axis) - rep.lambda()[axis];
            phase += nu * winding[pos];
        }
        matrix[[i, i]] = C::from_polar(T::one(), -phase);
    }
    Ok(matrix)
}

/// Max deviation of interior column norms from 1; `depth` controls which
/// labels count as interior.
pub fn unitarity_defect<T: Real>(u: &Array2<C<T>>, bounds: &TruncationBox, depth: i64) -> T {
    let labels = bounds.labels();
    let mut worst = T::zero();
    for (col, label) in labels.iter().enumerate() {
        if !bounds.is_interior(label, depth) {
            continue;
        }
        let norm = u
            .column(col)
            .iter()
            .fold(T::zero(), |acc, x| acc + x.norm_sqr())
            .sqrt();
        worst = worst.max((norm - T::one()).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::LatticeIndex;
    use crate::representation::{quantize_affine, Twist};
    use crate::spectra::ActionPolynomial;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn constant_tables(dim: usize, value: f64) -> LambdaTables<f64> {
        vec![vec![FourierSeries::constant(dim, c(value, 0.0))]]
    }

    fn spec1() -> PerturbationSpec<f64> {
        PerturbationSpec::new(1, vec![0], 1).unwrap()
    }

    fn rep1(lambda: f64) -> RepresentationParams<f64> {
        RepresentationParams::with_lambda(vec![lambda])
    }

    #[test]
    fn constant_coefficient_is_diagonal() {
        let spec = spec1();
        let rep = rep1(0.3);
        let op = quantize_perturbation(&spec, &constant_tables(1, 2.0), &[1.0], &rep).unwrap();
        assert_eq!(op.band_count(), 1);
        let p = op.band(&[0]);
        assert_eq!(p.coeff(&[1]), c(2.0, 0.0));
        assert!((p.coeff(&[0]) - c(-0.6, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_velocity_gives_zero_operator() {
        let spec = spec1();
        let op =
            quantize_perturbation(&spec, &constant_tables(1, 2.0), &[0.0], &rep1(0.3)).unwrap();
        assert!(op.is_zero(0.0));
    }

    #[test]
    fn cos_coefficient_reproduces_affine_bands() {
        let spec = spec1();
        let rep = rep1(0.0);
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))]];
        let op = quantize_perturbation(&spec, &tables, &[1.0], &rep).unwrap();
        let plus = op.band(&[1]);
        assert_eq!(plus.coeff(&[1]), c(0.5, 0.0));
        assert_eq!(plus.coeff(&[0]), c(0.25, 0.0));
        let minus = op.band(&[-1]);
        assert_eq!(minus.coeff(&[0]), c(-0.25, 0.0));
    }

    #[test]
    fn both_construction_routes_agree() {
        let spec = PerturbationSpec::new(2, vec![0], 2).unwrap();
        let rep = RepresentationParams::new(vec![0.3, 0.8], vec![Twist::Half, Twist::Trivial])
            .unwrap();
        let tables = vec![vec![
            FourierSeries::cosine(LatticeIndex(vec![1, 0])),
            FourierSeries::sine(LatticeIndex(vec![2, 0])),
        ]];
        let v = [0.7, -1.2];
        let direct = quantize_perturbation(&spec, &tables, &v, &rep).unwrap();
        let via_affine = quantize_affine(&spec.observable(&tables, &v).unwrap(), &rep).unwrap();
        assert!(direct.sub(&via_affine).unwrap().is_zero(1e-13));
    }

    #[test]
    fn table_validation_rejects_bad_input() {
        let spec = PerturbationSpec::new(2, vec![0], 1).unwrap();
        // Not real.
        let tables = vec![vec![FourierSeries::mode(LatticeIndex(vec![1, 0]), c(1.0, 0.0))]];
        assert!(matches!(
            spec.validate_tables(&tables),
            Err(Error::NonRealCoefficients)
        ));
        // Leaks onto the spectator axis.
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![0, 1]))]];
        assert!(matches!(
            spec.validate_tables(&tables),
            Err(Error::AxisLeakage { axis: 1 })
        ));
    }

    #[test]
    fn materialize_action_and_phase() {
        let rep = rep1(0.0);
        let action = crate::representation::action_operator(0, &rep).unwrap();
        let bounds = TruncationBox::new(1, 2, 0).unwrap();
        let m = materialize(&action, &bounds).unwrap();
        for (i, n) in (-2..=2i64).enumerate() {
            assert_eq!(m[[i, i]], c(n as f64, 0.0));
        }

        let m1 = ShiftOperator::pure_phase(&LatticeIndex(vec![1]));
        let bounds = TruncationBox::new(1, 1, 1).unwrap();
        let m = materialize(&m1, &bounds).unwrap();
        assert_eq!(m[[1, 0]], c(1.0, 0.0));
        assert_eq!(m[[2, 1]], c(1.0, 0.0));
        assert_eq!(m[[0, 0]], c(0.0, 0.0));

        // cosφ·I: pentadiagonal-free band structure with entries ½(n±½).
        let f = crate::poisson::AffineObservable::new(
            vec![FourierSeries::cosine(LatticeIndex(vec![1]))],
            FourierSeries::zero(1),
        )
        .unwrap();
        let op = quantize_affine(&f, &rep).unwrap();
        let bounds = TruncationBox::new(1, 2, 1).unwrap();
        let m = materialize(&op, &bounds).unwrap();
        // Column of label n=0 (index 2): up-shift amplitude ½(0+½), down ½(0−½).
        assert!((m[[3, 2]] - c(0.25, 0.0)).norm() < 1e-15);
        assert!((m[[1, 2]] - c(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn margin_violation_detected() {
        let m2 = ShiftOperator::<f64>::pure_phase(&LatticeIndex(vec![2]));
        let bounds = TruncationBox::new(1, 3, 1).unwrap();
        assert!(matches!(
            materialize(&m2, &bounds),
            Err(Error::MarginViolation { .. })
        ));
        assert!(TruncationBox::new(1, 1, 2).is_err());
    }

    fn two_node_path(
        xi: [f64; 2],
        tables: [LambdaTables<f64>; 2],
        closed: bool,
    ) -> ParameterPath<f64> {
        ParameterPath::new(
            vec![
                PathNode {
                    t: 0.0,
                    xi: vec![xi[0]],
                    lambda: tables[0].clone(),
                },
                PathNode {
                    t: 1.0,
                    xi: vec![xi[1]],
                    lambda: tables[1].clone(),
                },
            ],
            closed,
        )
        .unwrap()
    }

    #[test]
    fn stationary_path_gives_identity() {
        let spec = spec1();
        let rep = rep1(0.2);
        let bounds = TruncationBox::new(1, 3, 0).unwrap();
        let tables = constant_tables(1, 1.5);
        let path = two_node_path([0.4, 0.4], [tables.clone(), tables], false);
        let u = evolve_u2(&spec, &path, &rep, &bounds, 10).unwrap();
        let diff = &u - &Array2::<C<f64>>::eye(bounds.size());
        assert!(crate::expm::frobenius_norm(&diff) < 1e-13);
    }

    #[test]
    fn constant_coefficient_closed_form() {
        // All step generators coincide: U₂ = diag exp(−iΛ(n+ε−λ)Δξ).
        let spec = spec1();
        let rep = RepresentationParams::new(vec![0.3], vec![Twist::Half]).unwrap();
        let bounds = TruncationBox::new(1, 3, 0).unwrap();
        let lam = 0.9;
        let dxi = 0.7;
        let tables = constant_tables(1, lam);
        let path = two_node_path([0.0, dxi], [tables.clone(), tables], false);
        let u = evolve_u2(&spec, &path, &rep, &bounds, 25).unwrap();
        for (i, n) in (-3..=3i64).enumerate() {
            let nu = n as f64 + 0.5 - 0.3;
            let expected = C::from_polar(1.0, -lam * nu * dxi);
            assert!((u[[i, i]] - expected).norm() < 1e-12, "label {n}");
        }
    }

    #[test]
    fn abelian_loop_matches_trapezoid_oracle() {
        // ξ-dependent, φ-independent tables around a closed square loop.
        let spec = PerturbationSpec::new(1, vec![0], 2).unwrap();
        let rep = rep1(0.4);
        let bounds = TruncationBox::new(1, 4, 0).unwrap();
        // Λ_β(ξ) = π·(−ξ₂, ξ₁) gives ∮Λdσ = 2π·(area of the unit square).
        let corner_tables = |xi: &[f64; 2]| -> LambdaTables<f64> {
            vec![vec![
                FourierSeries::constant(1, c(-std::f64::consts::PI * xi[1], 0.0)),
                FourierSeries::constant(1, c(std::f64::consts::PI * xi[0], 0.0)),
            ]]
        };
        let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
        let nodes: Vec<PathNode<f64>> = corners
            .iter()
            .enumerate()
            .map(|(i, xi)| PathNode {
                t: i as f64,
                xi: xi.to_vec(),
                lambda: corner_tables(xi),
            })
            .collect();
        let path = ParameterPath::new(nodes, true).unwrap();

        let u = evolve_u2(&spec, &path, &rep, &bounds, 40).unwrap();
        let oracle = abelian_closed_form(&spec, &path, &rep, &bounds).unwrap();
        let diff = &u - &oracle;
        assert!(crate::expm::frobenius_norm(&diff) < 1e-10);

        // ∮ = 2π: every integer-shifted phase winds fully; λ leaves a
        // residual phase e^{+iλ·2π} per label.
        let expected0 = C::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.4);
        assert!((u[[4, 4]] - expected0).norm() < 1e-10);
    }

    #[test]
    fn u1_diagonal_phases() {
        let bounds = TruncationBox::new(2, 2, 0).unwrap();
        let rep = RepresentationParams::with_lambda(vec![0.0, 0.0]);
        let h = HamiltonianSpec::Poly(ActionPolynomial::action(2, 1).unwrap());
        let u = evolve_u1(&h, &[0], &rep, std::f64::consts::PI, &bounds).unwrap();
        for (i, label) in bounds.labels().iter().enumerate() {
            let expected = C::from_polar(1.0, -std::f64::consts::PI * label[1] as f64);
            assert!((u[[i, i]] - expected).norm() < 1e-12);
        }

        // t = 0 is the identity.
        let u0 = evolve_u1(&h, &[0], &rep, 0.0, &bounds).unwrap();
        assert!(crate::expm::frobenius_norm(&(&u0 - &Array2::<C<f64>>::eye(bounds.size()))) < 1e-15);

        // Constant Hamiltonian: one global phase.
        let e0 = 1.7;
        let hc = HamiltonianSpec::constant(2, e0);
        let uc = evolve_u1(&hc, &[0], &rep, 2.0, &bounds).unwrap();
        let phase = C::from_polar(1.0, -e0 * 2.0);
        assert!((uc[[0, 0]] - phase).norm() < 1e-14);

        // Dependence on the perturbed block is rejected.
        let bad = HamiltonianSpec::Poly(ActionPolynomial::action(2, 0).unwrap());
        assert!(matches!(
            evolve_u1(&bad, &[0], &rep, 1.0, &bounds),
            Err(Error::HamiltonianDependsOnBlock { axis: 0 })
        ));
    }

    #[test]
    fn hamiltonian_commutes_with_perturbation() {
        let spec = PerturbationSpec::new(2, vec![0], 1).unwrap();
        let rep = RepresentationParams::with_lambda(vec![0.2, 0.7]);
        let h = HamiltonianSpec::Poly(ActionPolynomial::from_terms(
            2,
            [(vec![0, 2], 1.0), (vec![0, 1], -0.5)],
        ));
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![2, 0]))]];
        let res = commute_check(&h, &spec, &tables, &[0.8], &rep).unwrap();
        assert!(res.is_zero(1e-13));

        // Δ = 0 commutes trivially.
        let res = commute_check(&h, &spec, &tables, &[0.0], &rep).unwrap();
        assert!(res.is_zero(0.0));
    }

    #[test]
    fn factorization_commutes_on_interior() {
        let spec = PerturbationSpec::new(2, vec![0], 1).unwrap();
        let rep = RepresentationParams::with_lambda(vec![0.1, 0.4]);
        let bounds = TruncationBox::new(2, 3, 1).unwrap();
        let h = HamiltonianSpec::Poly(ActionPolynomial::from_terms(2, [(vec![0, 2], 0.8)]));
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1, 0]))]];
        let path = two_node_path([0.0, 0.9], [tables.clone(), tables], false);
        let u2 = evolve_u2(&spec, &path, &rep, &bounds, 12).unwrap();
        let u1 = evolve_u1(&h, &[0], &rep, 1.3, &bounds).unwrap();
        let diff = &u1.dot(&u2) - &u2.dot(&u1);
        assert!(crate::expm::frobenius_norm(&diff) < 1e-10);
    }

    #[test]
    fn reversed_loop_is_identity() {
        let spec = spec1();
        let rep = rep1(0.25);
        let bounds = TruncationBox::new(1, 4, 1).unwrap();
        let t0 = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))]];
        let t1 = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))
            .scale(c(1.4, 0.0))]];
        let path = two_node_path([0.0, 0.6], [t0, t1], false);
        let forward = evolve_u2(&spec, &path, &rep, &bounds, 30).unwrap();
        let backward = evolve_u2(&spec, &path.reversed(), &rep, &bounds, 30).unwrap();
        let round = backward.dot(&forward);
        let diff = &round - &Array2::<C<f64>>::eye(bounds.size());
        assert!(crate::expm::frobenius_norm(&diff) < 1e-10);
    }

    #[test]
    fn interior_columns_stay_unit() {
        let spec = spec1();
        let rep = rep1(0.0);
        let bounds = TruncationBox::new(1, 8, 1).unwrap();
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))]];
        let path = two_node_path([0.0, 1.0], [tables.clone(), tables], false);
        let steps = 5;
        let u = evolve_u2(&spec, &path, &rep, &bounds, steps).unwrap();
        // Interior depth: band width (1) × steps applied.
        let defect = unitarity_defect(&u, &bounds, steps as i64);
        assert!(defect < 1e-8, "defect {defect}");
    }

    #[test]
    fn identity_reparametrization_is_exact() {
        let spec = spec1();
        let rep = rep1(0.3);
        let bounds = TruncationBox::new(1, 4, 1).unwrap();
        let tables = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))]];
        let path = two_node_path([0.0, 0.8], [tables.clone(), tables], false);
        let dev =
            reparametrize_check(&spec, &path, |t| t, &rep, &bounds, 12, 1).unwrap();
        assert!(dev < 1e-14);
    }

    #[test]
    fn quadratic_warp_constant_tables_exact() {
        // Diagonal commuting generators integrate the piecewise-linear data
        // exactly, so the warped product matches at any step count.
        let spec = spec1();
        let rep = rep1(0.45);
        let bounds = TruncationBox::new(1, 3, 0).unwrap();
        let tables = constant_tables(1, 1.1);
        let path = two_node_path([0.0, 1.0], [tables.clone(), tables], false);
        let dev =
            reparametrize_check(&spec, &path, |t| t * t, &rep, &bounds, 8, 5).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn warp_must_be_monotone() {
        let spec = spec1();
        let rep = rep1(0.0);
        let bounds = TruncationBox::new(1, 2, 0).unwrap();
        let tables = constant_tables(1, 1.0);
        let path = two_node_path([0.0, 1.0], [tables.clone(), tables], false);
        assert!(matches!(
            reparametrize_check(&spec, &path, |t: f64| (2.0 * t - 1.0).abs(), &rep, &bounds, 4, 6),
            Err(Error::NonMonotoneWarp)
        ));
    }

    #[test]
    fn refinement_shrinks_reparametrization_deviation_quadratically() {
        let spec = spec1();
        let rep = rep1(0.2);
        let bounds = TruncationBox::new(1, 6, 1).unwrap();
        // The coefficient rotates from cosφ to sinφ along the path, so step
        // generators do not commute and time-ordering genuinely matters.
        let t0 = vec![vec![FourierSeries::cosine(LatticeIndex(vec![1]))
            .scale(c(0.8, 0.0))]];
        let t1 = vec![vec![FourierSeries::sine(LatticeIndex(vec![1]))
            .scale(c(0.8, 0.0))]];
        let path = two_node_path([0.0, 1.0], [t0, t1], false);
        let warp = |t: f64| t * t;
        let coarse =
            reparametrize_check(&spec, &path, warp, &rep, &bounds, 10, 3).unwrap();
        let fine =
            reparametrize_check(&spec, &path, warp, &rep, &bounds, 100, 3).unwrap();
        let order = (coarse / fine).log10() / (10.0f64).log10();
        assert!(
            (1.6..=2.4).contains(&order),
            "order {order}, coarse {coarse}, fine {fine}"
        );
    }

    #[test]
    fn path_validation() {
        let tables = constant_tables(1, 1.0);
        assert!(matches!(
            ParameterPath::new(
                vec![PathNode {
                    t: 0.0,
                    xi: vec![0.0],
                    lambda: tables.clone(),
                }],
                false
            ),
            Err(Error::PathTooShort)
        ));
        assert!(matches!(
            ParameterPath::new(
                vec![
                    PathNode {
                        t: 0.0,
                        xi: vec![0.0],
                        lambda: tables.clone(),
                    },
                    PathNode {
                        t: 0.0,
                        xi: vec![1.0],
                        lambda: tables.clone(),
                    },
                ],
                false
            ),
            Err(Error::PathNotIncreasing { node: 1 })
        ));
        assert!(matches!(
            ParameterPath::new(
                vec![
                    PathNode {
                        t: 0.0,
                        xi: vec![0.0],
                        lambda: tables.clone(),
                    },
                    PathNode {
                        t: 1.0,
                        xi: vec![1.0],
                        lambda: tables,
                    },
                ],
                true
            ),
            Err(Error::PathNotClosed)
        ));
    }
}
