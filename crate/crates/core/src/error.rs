//! Error types shared across the library.

use thiserror::Error;

/// Errors raised by coefficient arithmetic, quantization, and evolution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("action degree {degree} exceeds the configured cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("analytic map {map} undefined at {value} (lattice point {label:?})")]
    AnalyticDomain {
        map: &'static str,
        value: f64,
        label: Vec<i64>,
    },

    #[error("coefficient series is not real within tolerance")]
    NonRealCoefficients,

    #[error("series support leaks onto axis {axis}, outside the perturbed action block")]
    AxisLeakage { axis: usize },

    #[error("band shift {shift:?} exceeds the truncation margin {margin}")]
    MarginViolation { shift: Vec<i64>, margin: i64 },

    #[error("truncation margin {margin} exceeds the box radius {radius}")]
    MarginExceedsRadius { margin: i64, radius: i64 },

    #[error("path node times must be strictly increasing (node {node})")]
    PathNotIncreasing { node: usize },

    #[error("closed path must return to its starting parameter point")]
    PathNotClosed,

    #[error("path must contain at least two nodes")]
    PathTooShort,

    #[error("step count per segment must be at least 1")]
    StepCount,

    #[error("time change must be strictly monotone and endpoint-preserving")]
    NonMonotoneWarp,

    #[error("Hamiltonian depends on perturbed action axis {axis}")]
    HamiltonianDependsOnBlock { axis: usize },

    #[error("half-form twist entries must be 0 or 1/2, got {value}")]
    InvalidTwist { value: f64 },

    #[error("analytic Hamiltonian ({map}) has no polynomial operator form")]
    NotPolynomial { map: &'static str },

    #[error("coefficient tables depend on the angles; no diagonal closed form")]
    NotAngleIndependent,

    #[error("non-finite entry produced during evolution")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
