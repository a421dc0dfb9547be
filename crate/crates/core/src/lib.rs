//! Resonance poles of a one-channel unitary S matrix and the non-Hermitian
//! effective Hamiltonians that produce them.
//!
//! * [`smatrix`] evaluates S in product and pole form, the energy-dependent
//!   coupling coefficients and cross sections.
//! * [`phase`] unwraps coupling phases and records jumps at their zeros.
//! * [`effham`] builds `H0 - (i/2) α Σ v vᵀ`, solves it bi-orthogonally and
//!   runs coupling-strength scans and fixed-point solves.
//! * [`crossing`] follows eigenvalues through avoided crossings and exceptional
//!   points and measures how the two states mix.

pub mod crossing;
pub mod effham;
mod eigen;
pub mod error;
pub mod phase;
pub mod smatrix;
pub mod tracking;
pub mod types;

pub use crossing::{
    chirality_indicator, exchange_alignment, find_critical, mixing_coefficients, phase_theta, sweep, Chirality,
    LinearFamily, MixingDiagnostics,
};
pub use effham::{
    assemble, eigensolve_biorthogonal, expand_in_basis, fixed_point_solve, trapping_scan, width_sum_rule_check,
    BiorthogonalSpectrum, EffectiveHamiltonian, FixedPoint, MixingTable, TrappingScan, WidthPartition,
};
pub use error::{Error, Result};
pub use phase::{phase_profile, total_change, PhaseJump, PhaseProfile};
pub use smatrix::{
    coupling_profile, coupling_w_fano, coupling_w_n, coupling_w_two, cross_section, s_double_pole, s_pole_form,
    s_product, CouplingProfile,
};
pub use tracking::{CriticalPoint, CrossingKind, HamiltonianFamily, SweepTrajectory};
pub use types::{make_grid, ComplexAmplitude, EnergyGrid, PoleSet, Resonance};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
