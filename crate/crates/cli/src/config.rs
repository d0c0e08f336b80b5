//! Run configuration: a strict JSON document, schema-checked before dispatch.
//!
//! Unknown keys are rejected everywhere. All numbers are parsed as doubles;
//! axis lists (`a_indices`) are 1-based in the file and converted internally.
//! The machine-readable schema lives in `schemas/runconfig.schema.json`.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use torusq::fourier::{FourierSeries, SeriesRecord};
use torusq::holonomy::{ParameterPath, PathNode, PerturbationSpec, TruncationBox};
use torusq::poisson::{AffineObservable, AffineRecord};
use torusq::representation::{RepresentationParams, Twist};
use torusq::spectra::{ActionPolynomial, AnalyticMap, HamiltonianSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub representation: RepresentationBlock,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub spectrum: Option<SpectrumBlock>,
    #[serde(default)]
    pub dirac_sweep: Option<DiracSweepBlock>,
    #[serde(default)]
    pub equivalence: Option<EquivalenceBlock>,
    #[serde(default)]
    pub holonomy: Option<HolonomyBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationBlock {
    pub lambda: Vec<f64>,
    pub epsilon: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub hamiltonian: HamiltonianBlock,
    pub window: i64,
    #[serde(default = "default_degeneracy_tolerance")]
    pub degeneracy_tolerance: f64,
    #[serde(default = "default_residual_tolerance")]
    pub residual_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<PolyTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub powers: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticBlock {
    pub map: AnalyticMap,
    pub poly: Vec<PolyTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSweepBlock {
    pub size: usize,
    #[serde(default = "default_support_radius")]
    pub support_radius: i64,
    #[serde(default = "default_modes_per_series")]
    pub modes_per_series: usize,
    #[serde(default = "default_residual_tolerance")]
    pub tolerance: f64,
    /// Explicit pairs checked before the random cases.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<ObservablePair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablePair {
    pub f: AffineRecord,
    pub g: AffineRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceBlock {
    pub cases: usize,
    #[serde(default = "default_equiv_radius")]
    pub support_radius: i64,
    #[serde(default = "default_modes_per_series")]
    pub modes_per_series: usize,
    #[serde(default = "default_gauge_range")]
    pub gauge_range: i64,
    #[serde(default = "default_residual_tolerance")]
    pub tolerance: f64,
    /// Explicit gauge shift vectors, cycled over the cases; random within
    /// `gauge_range` when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge_shifts: Vec<Vec<i64>>,
    /// Explicit twist patterns (entries 0 or 0.5), cycled over the cases;
    /// random when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twists: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyBlock {
    /// 1-based action axes the unperturbed Hamiltonian is independent of.
    pub a_indices: Vec<usize>,
    pub params: usize,
    pub nodes: Vec<NodeBlock>,
    pub closed: bool,
    #[serde(rename = "box")]
    pub bounds: BoxBlock,
    pub steps: usize,
    /// Interior depth for the unitarity assertion; defaults to the margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_depth: Option<i64>,
    #[serde(default = "default_closed_form_tolerance")]
    pub closed_form_tolerance: f64,
    #[serde(default = "default_unitarity_tolerance")]
    pub unitarity_tolerance: f64,
    /// Emit the dense U₂ rows into the report (on by default).
    #[serde(default = "default_true")]
    pub emit_matrix: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeBlock {
    pub t: f64,
    pub xi: Vec<f64>,
    /// `lambda[a][beta]` is a series-record list over the block angles.
    pub lambda: Vec<Vec<Vec<SeriesRecord>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxBlock {
    pub radius: i64,
    pub margin: i64,
}

fn default_degeneracy_tolerance() -> f64 {
    1e-9
}
fn default_residual_tolerance() -> f64 {
    1e-12
}
fn default_support_radius() -> i64 {
    3
}
fn default_equiv_radius() -> i64 {
    2
}
fn default_modes_per_series() -> usize {
    3
}
fn default_gauge_range() -> i64 {
    2
}
fn default_closed_form_tolerance() -> f64 {
    1e-10
}
fn default_unitarity_tolerance() -> f64 {
    1e-8
}
fn default_true() -> bool {
    true
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig =
            serde_json::from_str(&text).context("config does not match the schema")?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            bail!("dimension must be at least 1");
        }
        if self.representation.lambda.len() != self.dimension {
            bail!(
                "representation.lambda has {} entries, expected {}",
                self.representation.lambda.len(),
                self.dimension
            );
        }
        if self.representation.epsilon.len() != self.dimension {
            bail!(
                "representation.epsilon has {} entries, expected {}",
                self.representation.epsilon.len(),
                self.dimension
            );
        }
        Ok(())
    }

    pub fn representation_params(&self) -> Result<RepresentationParams<f64>> {
        let epsilon = self
            .representation
            .epsilon
            .iter()
            .map(|&v| Twist::from_value(v))
            .collect::<torusq::Result<Vec<_>>>()
            .context("epsilon entries must be 0 or 0.5")?;
        RepresentationParams::new(self.representation.lambda.clone(), epsilon)
            .context("representation parameters are inconsistent")
    }
}

pub fn poly_from_terms(dim: usize, terms: &[PolyTerm]) -> Result<ActionPolynomial<f64>> {
    for term in terms {
        if term.powers.len() != dim {
            bail!(
                "polynomial term has {} powers, expected {}",
                term.powers.len(),
                dim
            );
        }
    }
    Ok(ActionPolynomial::from_terms(
        dim,
        terms.iter().map(|t| (t.powers.clone(), t.coeff)),
    ))
}

impl HamiltonianBlock {
    pub fn to_spec(&self, dim: usize) -> Result<HamiltonianSpec<f64>> {
        match (&self.poly, &self.analytic) {
            (Some(terms), None) => Ok(HamiltonianSpec::Poly(poly_from_terms(dim, terms)?)),
            (None, Some(block)) => Ok(HamiltonianSpec::Analytic {
                map: block.map,
                inner: poly_from_terms(dim, &block.poly)?,
            }),
            _ => bail!("hamiltonian must have exactly one of `poly` or `analytic`"),
        }
    }
}

impl ObservablePair {
    pub fn to_observables(
        &self,
        dim: usize,
    ) -> Result<(AffineObservable<f64>, AffineObservable<f64>)> {
        let f = AffineObservable::from_record(dim, &self.f)
            .context("pair observable `f` is malformed")?;
        let g = AffineObservable::from_record(dim, &self.g)
            .context("pair observable `g` is malformed")?;
        Ok((f, g))
    }
}

impl HolonomyBlock {
    pub fn to_inputs(
        &self,
        dim: usize,
    ) -> Result<(PerturbationSpec<f64>, ParameterPath<f64>, TruncationBox)> {
        let mut zero_based = Vec::with_capacity(self.a_indices.len());
        for &axis in &self.a_indices {
            if axis == 0 || axis > dim {
                bail!("a_indices entries are 1-based and must lie in 1..={dim}");
            }
            zero_based.push(axis - 1);
        }
        let spec = PerturbationSpec::new(dim, zero_based, self.params)
            .context("perturbation block is inconsistent")?;

        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let mut lambda = Vec::with_capacity(node.lambda.len());
            for row in &node.lambda {
                let mut series_row = Vec::with_capacity(row.len());
                for records in row {
                    series_row.push(
                        FourierSeries::from_records(dim, records)
                            .with_context(|| format!("node {i}: malformed Lambda series"))?,
                    );
                }
                lambda.push(series_row);
            }
            nodes.push(PathNode {
                t: node.t,
                xi: node.xi.clone(),
                lambda,
            });
        }
        let path = ParameterPath::new(nodes, self.closed).context("path block is invalid")?;
        spec.validate_path(&path)
            .context("Lambda tables violate the perturbation invariants")?;
        let bounds = TruncationBox::new(dim, self.bounds.radius, self.bounds.margin)
            .context("box block is invalid")?;
        Ok((spec, path, bounds))
    }
}
