//! Geometric quantization of completely integrable Hamiltonian systems in
//! action-angle variables on the symplectic annulus V×T^m.
//!
//! The crate is organized along the quantization pipeline:
//!
//! - [`fourier`]: exact coefficient arithmetic for trigonometric polynomials
//!   on T^m, the substrate of every other module.
//! - [`poisson`]: the classical algebra — affine observables a^k(φ)I_k + b(φ),
//!   action-polynomial symbols, the Poisson bracket of Ω = dI_k∧dφ^k, and
//!   Hamiltonian vector fields.
//! - [`prequant`]: the Kostant–Souriau prequantum level — the λ-indexed
//!   family of connections on the trivial line bundle, the curvature
//!   condition R = iΩ, and the prequantum operator −i∇_{ϑ_f} + f acting on
//!   symbolic sections.
//! - [`representation`]: the polarized quantum algebra — affine observables
//!   represented as band (shift) operators on the Fourier basis of T^m, with
//!   adjoints, commutators, the Dirac-condition residual, and the gauge /
//!   half-form equivalence maps.
//! - [`spectra`]: Hamiltonians H(I) quantized as diagonal elements of the
//!   enveloping algebra, with windowed spectrum enumeration and degeneracy
//!   counting.
//! - [`holonomy`]: time-dependent-parameter perturbations, the factorized
//!   evolution, and the numerically path-ordered holonomy (Berry) operator
//!   on truncated Fourier lattices.
//! - [`sample`]: seeded random generators for observables and representation
//!   parameters, shared by property sweeps and the CLI.
//!
//! Everything is generic over the real scalar type via [`scalar::Real`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root.
//! All values are immutable after construction and all operations are pure,
//! so the library is safe for concurrent use without coordination. ħ = 1
//! throughout.

pub mod error;
pub mod expm;
pub mod fourier;
pub mod holonomy;
pub mod poisson;
pub mod prequant;
pub mod representation;
pub mod sample;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// `f64` instantiations of the core types.
pub type FourierSeries64 = fourier::FourierSeries<f64>;
pub type AffineObservable64 = poisson::AffineObservable<f64>;
pub type FourierTaylor64 = poisson::FourierTaylor<f64>;
pub type ConnectionParams64 = prequant::ConnectionParams<f64>;
pub type RepresentationParams64 = representation::RepresentationParams<f64>;
pub type ShiftOperator64 = representation::ShiftOperator<f64>;
pub type HamiltonianSpec64 = spectra::HamiltonianSpec<f64>;
pub type DiagonalOperator64 = spectra::DiagonalOperator<f64>;
pub type PerturbationSpec64 = holonomy::PerturbationSpec<f64>;
pub type ParameterPath64 = holonomy::ParameterPath<f64>;

/// `f32` instantiations, for callers trading precision for footprint.
pub type FourierSeries32 = fourier::FourierSeries<f32>;
pub type AffineObservable32 = poisson::AffineObservable<f32>;
pub type ShiftOperator32 = representation::ShiftOperator<f32>;
