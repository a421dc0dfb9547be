//! Two-state mixing through avoided crossings and exceptional points.
//!
//! The tracked state `k` is projected on the start-sample eigenvectors of `k`
//! and `l` with the bi-orthogonal product, giving `c_k` and `c_l`. Mixing
//! coefficients are `β_k = c_k / n` and `β_l = c_l / (i n)` with
//! `n = sqrt(|c_k|² + |c_l|²)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::effham::EffectiveHamiltonian;
use crate::error::{Error, Result};
use crate::phase::unwrap_phases;
use crate::tracking::{golden_section, min_distance, sweep_family, validate_grid, HamiltonianFamily, SweepTrajectory};

/// Edge of the mixing window: both `|β|` must exceed this inside it.
pub const MIXING_EDGE_TOL: f64 = 1e-2;
/// Largest relative residual allowed when projecting onto the two reference states.
pub const SPAN_TOL: f64 = 1e-6;
/// Bracket width at which [`find_critical`] stops.
pub const CRITICAL_TOLERANCE: f64 = 1e-10;
/// Relative residual difference below which the chirality is indeterminate.
pub const CHIRALITY_TOL: f64 = 1e-6;

/// `H(a) = (h0 + a h0_slope) - (i/2)(alpha + a alpha_slope) Σ_c v_c v_cᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFamily {
    base: EffectiveHamiltonian,
    h0_slope: DMatrix<f64>,
    alpha_slope: f64,
}

impl LinearFamily {
    pub fn new(base: EffectiveHamiltonian, h0_slope: DMatrix<f64>, alpha_slope: f64) -> Result<Self> {
        let n = base.dim();
        if h0_slope.nrows() != n || h0_slope.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: h0_slope.nrows(),
            });
        }
        if !alpha_slope.is_finite() {
            return Err(Error::InvalidCoupling(alpha_slope));
        }
        // Validates symmetry of the slope through the same constructor.
        EffectiveHamiltonian::new(h0_slope.clone(), base.couplings().to_vec(), 0.0)?;
        Ok(Self {
            base,
            h0_slope,
            alpha_slope,
        })
    }

    /// `[[0, ω], [ω, -iγ]]` with `γ` as the parameter; its exceptional point sits at `γ = 2ω`.
    pub fn two_level_loss(omega: f64) -> Result<Self> {
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, omega, omega, 0.0]);
        let v = DVector::from_column_slice(&[0.0, 1.0]);
        let base = EffectiveHamiltonian::new(h0, vec![v], 0.0)?;
        Self::new(base, DMatrix::zeros(2, 2), 2.0)
    }

    pub fn base(&self) -> &EffectiveHamiltonian {
        &self.base
    }

    pub fn h0_slope(&self) -> &DMatrix<f64> {
        &self.h0_slope
    }

    pub fn alpha_slope(&self) -> f64 {
        self.alpha_slope
    }
}

impl HamiltonianFamily for LinearFamily {
    fn at(&self, parameter: f64) -> Result<EffectiveHamiltonian> {
        EffectiveHamiltonian::new(
            self.base.h0() + &self.h0_slope * parameter,
            self.base.couplings().to_vec(),
            self.base.alpha() + self.alpha_slope * parameter,
        )
    }
}

/// Tracks all eigenpairs over a strictly increasing grid and flags critical points.
pub fn sweep<F: HamiltonianFamily + ?Sized>(family: &F, grid: &[f64]) -> Result<SweepTrajectory> {
    sweep_family(family, grid)
}

/// Parameter minimizing the smallest pairwise eigenvalue distance inside `bracket`.
pub fn find_critical<F: HamiltonianFamily + ?Sized>(family: &F, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    validate_grid(&[lo, hi])?;
    let edge = min_distance(family, lo)?.0.max(min_distance(family, hi)?.0);
    let slack = 1e-6 * edge;
    golden_section(
        |a| min_distance(family, a).map(|(d, _)| d),
        lo,
        hi,
        CRITICAL_TOLERANCE,
        Some(slack),
    )
    .map(|(a, _)| a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingDiagnostics {
    pub states: (usize, usize),
    pub parameters: Vec<f64>,
    /// Raw projections `(c_k, c_l)` per sample.
    pub projections: Vec<(Complex64, Complex64)>,
    /// `(β_k, β_l)` per sample.
    pub beta: Vec<(Complex64, Complex64)>,
    /// Unwrapped `θ_k` per sample.
    pub theta: Vec<f64>,
    /// First and last parameters where both `|β|` exceed [`MIXING_EDGE_TOL`].
    pub window: Option<(f64, f64)>,
}

/// Mixing of tracked state `k` with `l`, both referred to the start sample.
pub fn mixing_coefficients(trajectory: &SweepTrajectory, k: usize, l: usize) -> Result<MixingDiagnostics> {
    let n = trajectory.states();
    for index in [k, l] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
    }
    for state in [k, l] {
        if trajectory.defective[state][0] {
            return Err(Error::NearDefective {
                state,
                norm: trajectory.eigenvector_paths[state][0]
                    .dot(&trajectory.eigenvector_paths[state][0])
                    .norm(),
            });
        }
    }
    let reference_k = &trajectory.eigenvector_paths[k][0];
    let reference_l = &trajectory.eigenvector_paths[l][0];

    let mut projections = Vec::with_capacity(trajectory.len());
    let mut beta = Vec::with_capacity(trajectory.len());
    let mut raw_theta = Vec::with_capacity(trajectory.len());
    for (s, phi) in trajectory.eigenvector_paths[k].iter().enumerate() {
        let c_k = reference_k.dot(phi);
        let c_l = reference_l.dot(phi);
        let residual = (phi - reference_k * c_k - reference_l * c_l).norm() / phi.norm();
        if residual > SPAN_TOL {
            return Err(Error::SpanLeak {
                parameter: trajectory.parameter_samples[s],
                residual,
            });
        }
        let norm = (c_k.norm_sqr() + c_l.norm_sqr()).sqrt();
        projections.push((c_k, c_l));
        beta.push((c_k / norm, c_l / (Complex64::i() * norm)));
        // arg(β_k + iβ_l) with the phase of β_k removed sample by sample.
        raw_theta.push(((c_k + c_l) * c_k.conj()).arg());
    }
    let theta = unwrap_phases(&raw_theta);

    let inside: Vec<usize> = beta
        .iter()
        .enumerate()
        .filter(|(_, (bk, bl))| bk.norm().min(bl.norm()) > MIXING_EDGE_TOL)
        .map(|(s, _)| s)
        .collect();
    let window = match (inside.first(), inside.last()) {
        (Some(&first), Some(&last)) => Some((trajectory.parameter_samples[first], trajectory.parameter_samples[last])),
        _ => None,
    };

    Ok(MixingDiagnostics {
        states: (k, l),
        parameters: trajectory.parameter_samples.clone(),
        projections,
        beta,
        theta,
        window,
    })
}

/// `θ_k` along the sweep.
pub fn phase_theta(diagnostics: &MixingDiagnostics) -> Vec<f64> {
    diagnostics.theta.clone()
}

/// Sign of the `±i` in `β_k Φ_k ± i β_l Φ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub fn sign(&self) -> i8 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }
}

/// Chirality of state `k` relative to `l` at the last non-defective sample
/// before `critical`, approached from the start of the sweep.
///
/// The projection ratio `z = c_l conj(c_k) / |c_k|` is compared with `+i|z|`
/// and `-i|z|`; a real ratio fits both equally and is indeterminate.
pub fn chirality_indicator(trajectory: &SweepTrajectory, k: usize, l: usize, critical: f64) -> Result<Chirality> {
    let diagnostics = mixing_coefficients(trajectory, k, l)?;
    let sample = (0..trajectory.len())
        .rev()
        .find(|&s| trajectory.parameter_samples[s] < critical && !trajectory.defective[k][s])
        .ok_or(Error::IndeterminateChirality)?;
    let (c_k, c_l) = diagnostics.projections[sample];
    if c_k.norm() == 0.0 {
        return Err(Error::IndeterminateChirality);
    }
    let z = c_l * c_k.conj() / c_k.norm();
    let plus = (z - Complex64::new(0.0, z.norm())).norm();
    let minus = (z + Complex64::new(0.0, z.norm())).norm();
    if (plus - minus).abs() <= CHIRALITY_TOL * plus.max(minus) || z.norm() == 0.0 {
        return Err(Error::IndeterminateChirality);
    }
    Ok(if plus < minus {
        Chirality::Plus
    } else {
        Chirality::Minus
    })
}

/// Phase-sensitive agreement `Re(conj(a)·(s i b)) / (|a||b|)` maximized over `s = ±1`.
///
/// Equals 1 when `a` is a positive real multiple of `+i b` or `-i b`.
pub fn exchange_alignment(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    // Re(i a^H b) = -Im(a^H b).
    (a.dotc(b) / (a.norm() * b.norm())).im.abs()
}
