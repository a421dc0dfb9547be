use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid energy range [{min}, {max}] with {points} points: need min < max and at least 2 points")]
    InvalidRange { min: f64, max: f64, points: usize },
    #[error("resonance width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("resonance position must be finite, got {0}")]
    InvalidPosition(f64),
    #[error("a pole set needs at least one resonance")]
    EmptyPoleSet,
    #[error("state index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("degenerate denominator at order {order} (|e| = {magnitude:e})")]
    DegenerateDenominator { order: usize, magnitude: f64 },
    #[error("energy-independent coupling is singular at a double pole")]
    DoublePoleSingularity,
    #[error("a phase profile needs at least 2 samples, got {0}")]
    EmptyProfile(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("h0 is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error(
        "an effective Hamiltonian needs at least 2 states and 1 channel (got {states} states, {channels} channels)"
    )]
    TooSmall { states: usize, channels: usize },
    #[error("coupling strength must be finite and non-negative, got {0}")]
    InvalidCoupling(f64),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("state {state} is near-defective: bi-orthogonal self-norm {norm:e} below floor")]
    NearDefective { state: usize, norm: f64 },
    #[error("Schur decomposition did not converge")]
    EigenFailure,
    #[error("parameter grid must be strictly increasing with at least 2 finite samples")]
    InvalidParameterGrid,
    #[error("ambiguous eigenvalue tracking at parameter {parameter}: refine the grid")]
    TrackingAmbiguity { parameter: f64 },
    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("state {state} cannot be followed continuously at E = {energy}")]
    StateTracking { state: usize, energy: f64 },
    #[error("minimum eigenvalue distance is not unimodal on [{lo}, {hi}]")]
    NonUnimodal { lo: f64, hi: f64 },
    #[error("tracked state leaves the reference span at a = {parameter} (residual {residual:e})")]
    SpanLeak { parameter: f64, residual: f64 },
    #[error("chirality is indeterminate: both signs fit equally well")]
    IndeterminateChirality,
}
