//! The four run types: spectrum, Dirac sweep, equivalence checks, holonomy.
//!
//! Every command is a pure function of (config, seed): sweeps draw from a
//! seeded ChaCha stream and per-case records are emitted in case order, so
//! identical inputs produce byte-identical reports.

use crate::config::{RunConfig, HolonomyBlock};
use crate::report::{Report, ReportBuilder, ReportRecord};
use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torusq::expm::frobenius_norm;
use torusq::holonomy::{abelian_closed_form, evolve_u2, unitarity_defect};
use torusq::representation::{
    dirac_residual, gauge_intertwine_check, quantize_affine, RepresentationParams,
    ShiftOperator, Twist,
};
use torusq::sample;
use torusq::spectra::{
    degeneracy_table, lattice_window, quantize_hamiltonian, spectrum_window, HamiltonianSpec,
};

fn builder_with_header(
    command: &str,
    config: &RunConfig,
    seed: Option<u64>,
    tolerances: impl IntoIterator<Item = (&'static str, f64)>,
) -> ReportBuilder {
    Report::builder(command).header(
        config.dimension,
        &config.representation.lambda,
        &config.representation.epsilon,
        seed,
        tolerances,
    )
}

/// Largest coefficient sitting on a label monomial of total degree ≥ 2:
/// the quadratic-cancellation residual of a commutator.
fn quadratic_residual(op: &ShiftOperator<f64>) -> f64 {
    let mut worst = 0.0f64;
    for (_, poly) in op.bands() {
        for (powers, c) in poly.iter() {
            if powers.iter().sum::<u32>() >= 2 {
                worst = worst.max(c.norm());
            }
        }
    }
    worst
}

pub fn run_spectrum(config: &RunConfig, _seed: Option<u64>) -> Result<Report> {
    let block = config
        .spectrum
        .as_ref()
        .context("config has no `spectrum` block")?;
    let rep = config.representation_params()?;
    let hamiltonian = block.hamiltonian.to_spec(config.dimension)?;
    let diag = quantize_hamiltonian(hamiltonian.clone(), rep)?;

    let mut b = builder_with_header(
        "spectrum",
        config,
        None,
        [
            ("residual", block.residual_tolerance),
            ("degeneracy", block.degeneracy_tolerance),
        ],
    );

    for (value, label) in spectrum_window(&diag, block.window)? {
        b.push(ReportRecord::Eigenvalue {
            n: label.0.clone(),
            value,
        });
    }
    for (value, multiplicity) in degeneracy_table(&diag, block.window, block.degeneracy_tolerance)?
    {
        b.push(ReportRecord::Degeneracy {
            value,
            multiplicity,
        });
    }

    // Cross-check the lazy eigenvalue rule against the explicit
    // enveloping-algebra composition (polynomial Hamiltonians only).
    match &hamiltonian {
        HamiltonianSpec::Poly(_) => {
            let explicit = diag.to_shift_operator()?;
            let zero = vec![0i64; config.dimension];
            let mut residual = 0.0f64;
            for label in lattice_window(config.dimension, block.window) {
                let lazy = diag.eigenvalue(&label)?;
                let composed = explicit.band(&zero).eval_at_label(&label);
                residual = residual
                    .max((lazy - composed.re).abs())
                    .max(composed.im.abs());
            }
            b.case(
                0,
                Some("enveloping-vs-lazy".to_string()),
                residual,
                block.residual_tolerance,
            );
        }
        HamiltonianSpec::Analytic { .. } => {
            b.case(
                0,
                Some("analytic: pointwise rule only".to_string()),
                0.0,
                block.residual_tolerance,
            );
        }
    }
    Ok(b.finish(0))
}

pub fn run_dirac_sweep(config: &RunConfig, seed: Option<u64>) -> Result<Report> {
    let block = config
        .dirac_sweep
        .as_ref()
        .context("config has no `dirac_sweep` block")?;
    let rep = config.representation_params()?;
    let effective_seed = seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(effective_seed);
    let dim = config.dimension;

    let mut b = builder_with_header(
        "dirac-sweep",
        config,
        Some(effective_seed),
        [("residual", block.tolerance)],
    );

    let mut index = 0usize;
    let mut run_pair = |b: &mut ReportBuilder,
                        f: &torusq::poisson::AffineObservable<f64>,
                        g: &torusq::poisson::AffineObservable<f64>,
                        detail: Option<String>|
     -> Result<()> {
        let residual = dirac_residual(f, g, &rep)?.max_abs_coeff();
        let comm = quantize_affine(f, &rep)?
            .commutator(&quantize_affine(g, &rep)?)?;
        let total = residual.max(quadratic_residual(&comm));
        b.case(index, detail, total, block.tolerance);
        index += 1;
        Ok(())
    };

    for pair in &block.pairs {
        let (f, g) = pair.to_observables(dim)?;
        run_pair(&mut b, &f, &g, Some("explicit".to_string()))?;
    }
    for _ in 0..block.size {
        let f = sample::random_real_affine::<f64>(
            &mut rng,
            dim,
            block.support_radius,
            block.modes_per_series,
        );
        let g = sample::random_real_affine::<f64>(
            &mut rng,
            dim,
            block.support_radius,
            block.modes_per_series,
        );
        run_pair(&mut b, &f, &g, None)?;
    }
    Ok(b.finish(0))
}

pub fn run_equivalence(config: &RunConfig, seed: Option<u64>) -> Result<Report> {
    let block = config
        .equivalence
        .as_ref()
        .context("config has no `equivalence` block")?;
    let effective_seed = seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(effective_seed);
    let dim = config.dimension;

    for shift in &block.gauge_shifts {
        if shift.len() != dim {
            bail!("gauge shift {shift:?} must have {dim} entries");
        }
    }
    let explicit_twists: Vec<Vec<Twist>> = block
        .twists
        .iter()
        .map(|pattern| {
            if pattern.len() != dim {
                bail!("twist pattern {pattern:?} must have {dim} entries");
            }
            pattern
                .iter()
                .map(|&v| Twist::from_value(v).map_err(anyhow::Error::from))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut b = builder_with_header(
        "equivalence",
        config,
        Some(effective_seed),
        [("residual", block.tolerance)],
    );

    for i in 0..block.cases {
        let f = sample::random_real_affine::<f64>(
            &mut rng,
            dim,
            block.support_radius,
            block.modes_per_series,
        );
        let lambda: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let epsilon = if explicit_twists.is_empty() {
            (0..dim)
                .map(|_| {
                    if rng.random::<bool>() {
                        Twist::Half
                    } else {
                        Twist::Trivial
                    }
                })
                .collect()
        } else {
            explicit_twists[i % explicit_twists.len()].clone()
        };
        let rep_case = RepresentationParams::new(lambda, epsilon)?;
        let d = if block.gauge_shifts.is_empty() {
            sample::random_gauge(&mut rng, dim, block.gauge_range)
        } else {
            block.gauge_shifts[i % block.gauge_shifts.len()].clone()
        };

        let gauge = gauge_intertwine_check(&f, &rep_case, &d)?.max_abs_coeff();
        let folded = quantize_affine(&f, &rep_case.twist_reduce())?;
        let twist = quantize_affine(&f, &rep_case)?
            .sub(&folded)?
            .max_abs_coeff();
        b.case(
            i,
            Some(format!("gauge d={d:?}")),
            gauge.max(twist),
            block.tolerance,
        );
    }
    Ok(b.finish(0))
}

pub fn run_holonomy(config: &RunConfig, _seed: Option<u64>) -> Result<Report> {
    let block: &HolonomyBlock = config
        .holonomy
        .as_ref()
        .context("config has no `holonomy` block")?;
    let rep = config.representation_params()?;
    let (spec, path, bounds) = block.to_inputs(config.dimension)?;

    let mut b = builder_with_header(
        "holonomy",
        config,
        None,
        [
            ("closed_form", block.closed_form_tolerance),
            ("unitarity", block.unitarity_tolerance),
        ],
    );

    let u2 = evolve_u2(&spec, &path, &rep, &bounds, block.steps)?;
    let labels = bounds.labels();
    if block.emit_matrix {
        for (i, row) in u2.rows().into_iter().enumerate() {
            b.push(ReportRecord::U2Row {
                index: i,
                label: labels[i].clone(),
                re: row.iter().map(|c| c.re).collect(),
                im: row.iter().map(|c| c.im).collect(),
            });
        }
    }

    let depth = block.interior_depth.unwrap_or(bounds.margin());
    let defect = unitarity_defect(&u2, &bounds, depth);
    b.check(defect, block.unitarity_tolerance);

    let closed_form_deviation = if path.angle_independent() {
        let oracle = abelian_closed_form(&spec, &path, &rep, &bounds)?;
        let deviation = frobenius_norm(&(&u2 - &oracle));
        b.check(deviation, block.closed_form_tolerance);
        Some(deviation)
    } else {
        None
    };

    b.push(ReportRecord::HolonomySummary {
        steps: block.steps,
        box_radius: bounds.radius(),
        box_margin: bounds.margin(),
        interior_depth: depth,
        interior_unitarity_defect: defect,
        closed_form_deviation,
    });
    b.count_case();
    Ok(b.finish(0))
}
