//! Effective Hamiltonians `H0 - (i/2) α Σ_c v_c v_cᵀ` and their bi-orthogonal spectra.
//!
//! Inner products follow two conventions. The bi-orthogonal product
//! `Σ_i a_i b_i` has no conjugation and is what normalizes eigenvectors; the
//! Hermitian product `Σ_i conj(a_i) b_i` gives `A_k` and `B_k^l`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::eigen::{eigen_decompose, eigenvalues};
use crate::error::{Error, Result};
use crate::tracking::{sweep_family, HamiltonianFamily, SweepTrajectory};

/// Eigenvectors whose unit-vector self-product `|xᵀx|` falls below this are near-defective.
pub const DEFECT_FLOOR: f64 = 1e-10;
/// Relative asymmetry tolerated in `h0`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Residual `|Ẽ_k(E) - E|` at which the fixed-point iteration stops.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 10_000;
pub const FIXED_POINT_DAMPING: f64 = 0.5;
/// The iteration is abandoned once the residual grows this far beyond its start value.
pub const FIXED_POINT_DIVERGENCE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    h0: DMatrix<f64>,
    couplings: Vec<DVector<f64>>,
    alpha: f64,
}

impl EffectiveHamiltonian {
    /// Validates shapes and symmetry. `h0` is symmetrized exactly so the
    /// assembled matrix is complex symmetric bit for bit.
    pub fn new(h0: DMatrix<f64>, couplings: Vec<DVector<f64>>, alpha: f64) -> Result<Self> {
        let n = h0.nrows();
        if h0.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: h0.ncols(),
            });
        }
        if n < 2 || couplings.is_empty() {
            return Err(Error::TooSmall {
                states: n,
                channels: couplings.len(),
            });
        }
        if let Some(v) = couplings.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidCoupling(alpha));
        }
        if h0
            .iter()
            .chain(couplings.iter().flat_map(|v| v.iter()))
            .any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let scale = h0.amax();
        let asymmetry = (&h0 - h0.transpose()).amax();
        if asymmetry > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric(asymmetry / scale));
        }
        let h0 = (&h0 + h0.transpose()) * 0.5;
        Ok(Self { h0, couplings, alpha })
    }

    pub fn h0(&self) -> &DMatrix<f64> {
        &self.h0
    }

    pub fn couplings(&self) -> &[DVector<f64>] {
        &self.couplings
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn channels(&self) -> usize {
        self.couplings.len()
    }

    /// Same `h0` and couplings at another coupling strength.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.h0.clone(), self.couplings.clone(), alpha)
    }

    /// `Σ_c |v_c|²`; the summed width equals `alpha` times this.
    pub fn coupling_norm_sqr(&self) -> f64 {
        self.couplings.iter().map(|v| v.norm_squared()).sum()
    }

    pub fn assemble(&self) -> DMatrix<Complex64> {
        assemble(self)
    }
}

/// `h0 - (i/2) α Σ_c v_c v_cᵀ`. Shapes were checked at construction.
pub fn assemble(h: &EffectiveHamiltonian) -> DMatrix<Complex64> {
    let n = h.dim();
    let mut loss = DMatrix::<f64>::zeros(n, n);
    for v in &h.couplings {
        loss += v * v.transpose();
    }
    DMatrix::from_fn(n, n, |i, j| Complex64::new(h.h0[(i, j)], -0.5 * h.alpha * loss[(i, j)]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalSpectrum {
    /// `Ẽ_k - (i/2) Γ_k`, ascending in real part.
    pub eigenvalues: Vec<Complex64>,
    /// `Σ_i Φ_k,i² = 1` for each vector.
    pub eigenvectors: Vec<DVector<Complex64>>,
    /// `A_k = Σ_i |Φ_k,i|² ≥ 1`.
    pub a_norms: Vec<f64>,
    /// `B_k^l = |Σ_i conj(Φ_k,i) Φ_l,i|` off the diagonal; the diagonal is zero.
    pub b_overlaps: DMatrix<f64>,
    /// `γ_k^c = √α v_cᵀ Φ_k`, rows are states and columns channels.
    pub gammas: DMatrix<Complex64>,
}

impl BiorthogonalSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    /// Full widths `Γ_k = -2 Im λ_k`.
    pub fn widths(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| -2.0 * z.im).collect()
    }

    /// `Σ_i conj(Φ_k,i) Φ_l,i`.
    pub fn hermitian_overlap(&self, k: usize, l: usize) -> Complex64 {
        self.eigenvectors[k].dotc(&self.eigenvectors[l])
    }

    /// `Σ_i Φ_k,i Φ_l,i`.
    pub fn biorthogonal_product(&self, k: usize, l: usize) -> Complex64 {
        self.eigenvectors[k].dot(&self.eigenvectors[l])
    }

    /// `max_{k,l} |Σ_i Φ_l,i Φ_k,i - δ_kl|`.
    pub fn biorthogonality_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                let delta = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((self.biorthogonal_product(k, l) - delta).norm());
            }
        }
        worst
    }
}

/// Rescales a unit vector to `Σ x_i² = 1`; `None` when `|Σ x_i²|` is below the defect floor.
pub(crate) fn biorthogonal_normalize(unit: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    let self_product = unit.dot(unit);
    if self_product.norm() < DEFECT_FLOOR {
        return None;
    }
    Some(unit / self_product.sqrt())
}

/// Fixes the residual ±1 so the largest component has positive real part
/// (positive imaginary part when it is essentially imaginary).
pub(crate) fn fix_sign(vector: &mut DVector<Complex64>) {
    let largest = vector.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let Some(pivot) = vector.iter().find(|z| z.norm() >= largest * (1.0 - 1e-9)).copied() else {
        return;
    };
    let negative = if pivot.re.abs() > 1e-12 * pivot.norm() {
        pivot.re < 0.0
    } else {
        pivot.im < 0.0
    };
    if negative {
        vector.neg_mut();
    }
}

pub fn eigensolve_biorthogonal(h: &EffectiveHamiltonian) -> Result<BiorthogonalSpectrum> {
    let eig = eigen_decompose(&h.assemble())?;
    let n = eig.values.len();
    let mut vectors = Vec::with_capacity(n);
    for (state, unit) in eig.vectors.iter().enumerate() {
        let mut phi = biorthogonal_normalize(unit).ok_or(Error::NearDefective {
            state,
            norm: unit.dot(unit).norm(),
        })?;
        fix_sign(&mut phi);
        vectors.push(phi);
    }

    let a_norms = vectors.iter().map(|v| v.norm_squared()).collect();
    let b_overlaps = DMatrix::from_fn(n, n, |k, l| {
        if k == l {
            0.0
        } else {
            vectors[k].dotc(&vectors[l]).norm()
        }
    });
    let root_alpha = h.alpha.sqrt();
    let gammas = DMatrix::from_fn(n, h.channels(), |k, c| {
        let v = h.couplings[c].map(|x| Complex64::new(x, 0.0));
        v.dot(&vectors[k]) * root_alpha
    });

    Ok(BiorthogonalSpectrum {
        eigenvalues: eig.values,
        eigenvectors: vectors,
        a_norms,
        b_overlaps,
        gammas,
    })
}

/// `|Γ_k - Σ_c |γ_k^c|² / A_k|` per state; zero up to rounding for every spectrum.
pub fn width_sum_rule_check(spec: &BiorthogonalSpectrum) -> Vec<f64> {
    spec.widths()
        .iter()
        .enumerate()
        .map(|(k, gamma)| {
            let partial: f64 = spec.gammas.row(k).iter().map(|g| g.norm_sqr()).sum();
            (gamma - partial / spec.a_norms[k]).abs()
        })
        .collect()
}

/// Eigenvectors of the effective Hamiltonian written in the real eigenbasis of `h0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingTable {
    /// `b_kl`, row `k` is the state and column `l` the basis vector.
    pub coefficients: DMatrix<Complex64>,
    /// Orthonormal eigenvectors of `h0` as columns, ascending in energy.
    pub basis: DMatrix<f64>,
    pub basis_energies: Vec<f64>,
}

impl MixingTable {
    /// `Σ_l b_kl Φ_l`.
    pub fn reconstruct(&self, k: usize) -> DVector<Complex64> {
        let basis = self.basis.map(|x| Complex64::new(x, 0.0));
        basis * self.coefficients.row(k).transpose()
    }

    /// Largest `|Σ_l b_kl Φ_l - Φ_k|` over the states of `spec`.
    pub fn reconstruction_residual(&self, spec: &BiorthogonalSpectrum) -> f64 {
        (0..spec.len())
            .map(|k| (self.reconstruct(k) - &spec.eigenvectors[k]).norm())
            .fold(0.0, f64::max)
    }
}

pub fn expand_in_basis(spec: &BiorthogonalSpectrum, h0: &DMatrix<f64>) -> Result<MixingTable> {
    let n = spec.len();
    if h0.nrows() != n || h0.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h0.nrows(),
        });
    }
    let decomposition = SymmetricEigen::new(h0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));

    let mut basis = DMatrix::<f64>::zeros(n, n);
    for (column, &source) in order.iter().enumerate() {
        let mut v = decomposition.eigenvectors.column(source).into_owned();
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            v.neg_mut();
        }
        basis.set_column(column, &v);
    }
    let complex_basis = basis.map(|x| Complex64::new(x, 0.0));
    let coefficients = DMatrix::from_fn(n, n, |k, l| complex_basis.column(l).dot(&spec.eigenvectors[k]));

    Ok(MixingTable {
        coefficients,
        basis,
        basis_energies: order.iter().map(|&i| decomposition.eigenvalues[i]).collect(),
    })
}

/// How the summed width splits between the `C` broadest states and the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthPartition {
    pub alpha: f64,
    pub total_width: f64,
    pub broad_width: f64,
    pub trapped_width: f64,
    /// `trapped_width / total_width`; NaN when the total vanishes.
    pub trapped_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct TrappingScan {
    pub trajectory: SweepTrajectory,
    pub partitions: Vec<WidthPartition>,
}

/// Follows the spectrum as the coupling strength runs over `alphas`.
pub fn trapping_scan(h0: &DMatrix<f64>, couplings: &[DVector<f64>], alphas: &[f64]) -> Result<TrappingScan> {
    if let Some(&bad) = alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidCoupling(bad));
    }
    let base = EffectiveHamiltonian::new(h0.clone(), couplings.to_vec(), 0.0)?;
    let family = |alpha: f64| base.with_alpha(alpha);
    let trajectory = sweep_family(&family, alphas)?;

    let channels = couplings.len();
    let partitions = (0..trajectory.len())
        .map(|s| {
            let mut widths: Vec<f64> = trajectory
                .eigenvalue_paths
                .iter()
                .map(|path| -2.0 * path[s].im)
                .collect();
            widths.sort_by(|a, b| b.total_cmp(a));
            let broad_width: f64 = widths.iter().take(channels).sum();
            let trapped_width: f64 = widths.iter().skip(channels).sum();
            let total_width = broad_width + trapped_width;
            WidthPartition {
                alpha: trajectory.parameter_samples[s],
                total_width,
                broad_width,
                trapped_width,
                trapped_fraction: if total_width == 0.0 {
                    f64::NAN
                } else {
                    trapped_width / total_width
                },
            }
        })
        .collect();
    Ok(TrappingScan { trajectory, partitions })
}

/// Self-consistent pole `E_k = Ẽ_k(E_k)` with its width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub energy: f64,
    pub width: f64,
    pub iterations: usize,
}

/// Damped iteration `E ← E + ½(Ẽ_k(E) - E)` on an energy-dependent family.
///
/// State `k` is picked by sorted position at `e_start` and afterwards
/// followed by nearest eigenvalue. Stops with [`Error::NonConvergence`] at the
/// iteration cap or as soon as the residual exceeds its start value (at least
/// 1) by [`FIXED_POINT_DIVERGENCE`].
pub fn fixed_point_solve<F: HamiltonianFamily + ?Sized>(family: &F, k: usize, e_start: f64) -> Result<FixedPoint> {
    let initial = eigenvalues(&family.at(e_start)?.assemble())?;
    let mut current = *initial.get(k).ok_or(Error::IndexOutOfRange {
        index: k,
        len: initial.len(),
    })?;
    let mut energy = e_start;
    let ceiling = FIXED_POINT_DIVERGENCE * (current.re - energy).abs().max(1.0);
    for iteration in 0..=FIXED_POINT_MAX_ITERATIONS {
        let residual = (current.re - energy).abs();
        if residual < FIXED_POINT_TOLERANCE {
            return Ok(FixedPoint {
                energy,
                width: -2.0 * current.im,
                iterations: iteration,
            });
        }
        if iteration == FIXED_POINT_MAX_ITERATIONS || residual > ceiling {
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual,
            });
        }
        energy += FIXED_POINT_DAMPING * (current.re - energy);
        if !(energy.is_finite() && energy.abs() < 1e300) {
            return Err(Error::NonConvergence {
                iterations: iteration + 1,
                residual,
            });
        }
        let values = eigenvalues(&family.at(energy)?.assemble())?;
        current = follow(&values, current).ok_or(Error::StateTracking { state: k, energy })?;
    }
    unreachable!("the loop returns at the iteration cap")
}

/// Nearest eigenvalue to `previous`, or `None` when the nearest two are tied.
fn follow(values: &[Complex64], previous: Complex64) -> Option<Complex64> {
    let mut distances: Vec<(f64, Complex64)> = values.iter().map(|&z| ((z - previous).norm(), z)).collect();
    distances.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nearest, value) = distances[0];
    match distances.get(1) {
        Some(&(second, other)) if second <= nearest * (1.0 + 1e-9) && other != value => None,
        _ => Some(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ham(h0: &[f64], n: usize, couplings: &[&[f64]], alpha: f64) -> EffectiveHamiltonian {
        EffectiveHamiltonian::new(
            DMatrix::from_row_slice(n, n, h0),
            couplings.iter().map(|v| DVector::from_column_slice(v)).collect(),
            alpha,
        )
        .unwrap()
    }

    /// Roots of `λ² - tr λ + det` for a 2×2 matrix.
    fn quadratic_roots(m: &DMatrix<Complex64>) -> [Complex64; 2] {
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let root = (tr * tr - 4.0 * det).sqrt();
        [(tr - root) / 2.0, (tr + root) / 2.0]
    }

    fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize, channels: usize) -> EffectiveHamiltonian {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let h0 = (&a + a.transpose()) * 0.5;
        let couplings = (0..channels)
            .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        EffectiveHamiltonian::new(h0, couplings, rng.random_range(0.0..3.0)).unwrap()
    }

    #[test]
    fn construction_validates() {
        let h0 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let v = DVector::from_column_slice(&[1.0, 0.0]);
        assert!(matches!(
            EffectiveHamiltonian::new(h0.clone(), vec![DVector::from_column_slice(&[1.0])], 1.0),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
        assert!(matches!(
            EffectiveHamiltonian::new(h0.clone(), vec![], 1.0),
            Err(Error::TooSmall { .. })
        ));
        assert!(matches!(
            EffectiveHamiltonian::new(h0.clone(), vec![v.clone()], -1.0),
            Err(Error::InvalidCoupling(_))
        ));
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.9, 0.0]);
        assert!(matches!(
            EffectiveHamiltonian::new(skew, vec![v], 1.0),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn assemble_closed_limit() {
        let h = ham(&[1.0, 0.2, 0.2, 2.0], 2, &[&[1.0, 1.0]], 0.0);
        assert_eq!(assemble(&h), h.h0().map(|x| c(x, 0.0)));
    }

    #[test]
    fn assemble_rank_one() {
        let h = ham(&[0.0; 4], 2, &[&[1.0, 1.0]], 1.0);
        assert_eq!(assemble(&h), DMatrix::from_element(2, 2, c(0.0, -0.5)));
    }

    #[test]
    fn assemble_diagonal_loss() {
        let h = ham(&[-1.0, 0.0, 0.0, 1.0], 2, &[&[1.0, 0.0]], 2.0);
        let expected = DMatrix::from_row_slice(2, 2, &[c(-1.0, -1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(assemble(&h), expected);
    }

    #[test]
    fn hermitian_limit() {
        let h = ham(&[1.0, 0.0, 0.0, 2.0], 2, &[&[0.3, 0.7]], 0.0);
        let spec = eigensolve_biorthogonal(&h).unwrap();
        assert_eq!(spec.eigenvalues, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(spec.widths().iter().all(|&g| g == 0.0));
        assert!(spec.a_norms.iter().all(|&a| (a - 1.0).abs() < 1e-15));
        assert!(spec.b_overlaps.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn rank_one_traps_one_state() {
        let h = ham(&[0.0; 4], 2, &[&[1.0, 1.0]], 1.0);
        let spec = eigensolve_biorthogonal(&h).unwrap();
        let oracle = quadratic_roots(&h.assemble());
        let widths = spec.widths();
        let mut sorted = widths.clone();
        sorted.sort_by(f64::total_cmp);
        assert!(sorted[0].abs() < 1e-15 && (sorted[1] - 2.0).abs() < 1e-15);
        for root in oracle {
            assert!(spec.eigenvalues.iter().any(|z| (z - root).norm() < 1e-15));
        }

        let table = expand_in_basis(&spec, h.h0()).unwrap();
        assert!(table.reconstruction_residual(&spec) < 1e-10);
        for b in table.coefficients.iter() {
            assert!((b.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_with_split_levels() {
        // A diagonal h0 keeps the site basis; the coupling still mixes both sites equally.
        let h = ham(&[0.0, 0.0, 0.0, 1e-9], 2, &[&[1.0, 1.0]], 1.0);
        let spec = eigensolve_biorthogonal(&h).unwrap();
        let table = expand_in_basis(&spec, h.h0()).unwrap();
        for b in table.coefficients.iter() {
            assert!((b.norm() - 0.5f64.sqrt()).abs() < 1e-6);
        }
    }

    #[test]
    fn two_level_overlap_example() {
        let h = ham(&[0.0, 0.5, 0.5, 0.0], 2, &[&[0.0, 1.0]], 1.9);
        let spec = eigensolve_biorthogonal(&h).unwrap();
        assert!(spec.a_norms.iter().all(|&a| a > 1.0));
        let total: f64 = spec.widths().iter().sum();
        assert!((total - 1.9).abs() < 1e-12);
        let residuals = width_sum_rule_check(&spec);
        assert!(residuals.iter().all(|&r| r < 1e-10 * 1.9));
    }

    #[test]
    fn isolated_resonances_have_unit_norm() {
        let h = ham(
            &[0.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0, 20.0],
            3,
            &[&[1.0, 1.0, 1.0]],
            1e-3,
        );
        let spec = eigensolve_biorthogonal(&h).unwrap();
        for k in 0..3 {
            assert!((spec.a_norms[k] - 1.0).abs() < 1e-6);
            let partial: f64 = spec.gammas.row(k).iter().map(|g| g.norm_sqr()).sum();
            assert!((spec.widths()[k] - partial).abs() < 1e-6 * partial);
        }
    }

    #[test]
    fn near_defective_is_reported() {
        let h = ham(&[0.0, 0.5, 0.5, 0.0], 2, &[&[0.0, 1.0]], 2.0);
        assert!(matches!(eigensolve_biorthogonal(&h), Err(Error::NearDefective { .. })));
    }

    #[test]
    fn mixing_reconstructs_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = random_hamiltonian(&mut rng, 5, 2);
            let spec = eigensolve_biorthogonal(&h).unwrap();
            let table = expand_in_basis(&spec, h.h0()).unwrap();
            assert!(table.reconstruction_residual(&spec) < 1e-10);
            let gram = &table.coefficients * table.coefficients.transpose();
            assert!((gram - DMatrix::identity(5, 5)).camax() < 1e-10);
        }
    }

    #[test]
    fn mixing_closed_limit_is_identity() {
        let h = ham(
            &[1.0, 0.3, 0.0, 0.3, 2.0, 0.1, 0.0, 0.1, 3.0],
            3,
            &[&[1.0, 0.0, 0.0]],
            0.0,
        );
        let spec = eigensolve_biorthogonal(&h).unwrap();
        let table = expand_in_basis(&spec, h.h0()).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let expected = if k == l { 1.0 } else { 0.0 };
                assert!((table.coefficients[(k, l)].norm() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expand_checks_dimensions() {
        let h = ham(&[1.0, 0.0, 0.0, 2.0], 2, &[&[1.0, 0.0]], 0.1);
        let spec = eigensolve_biorthogonal(&h).unwrap();
        assert!(expand_in_basis(&spec, &DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn trapping_one_channel_four_states() {
        let h0 = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.2, 0.1, 0.0, //
                0.2, 1.0, 0.3, 0.1, //
                0.1, 0.3, 2.0, 0.2, //
                0.0, 0.1, 0.2, 3.0,
            ],
        );
        let v = vec![DVector::from_column_slice(&[0.6, 0.4, 0.5, 0.45])];
        let alphas: Vec<f64> = (0..=400).map(|i| 10f64.powf(-3.0 + 7.0 * i as f64 / 400.0)).collect();
        let mut grid = vec![0.0];
        grid.extend(alphas);
        let scan = trapping_scan(&h0, &v, &grid).unwrap();
        let norm: f64 = v[0].norm_squared();
        assert!(scan.partitions[0].total_width.abs() < 1e-15);
        for p in &scan.partitions {
            assert!((p.total_width - p.alpha * norm).abs() <= 1e-10 * (p.alpha * norm).max(1e-300));
        }
        let last = scan.partitions.last().unwrap();
        assert!(last.trapped_fraction < 1e-2);
        assert!(scan.partitions[200].trapped_fraction > last.trapped_fraction);
    }

    #[test]
    fn trapping_rejects_negative_alpha() {
        let h0 = DMatrix::identity(2, 2);
        let v = vec![DVector::from_column_slice(&[1.0, 0.0])];
        assert!(trapping_scan(&h0, &v, &[-1.0, 0.0]).is_err());
        assert!(matches!(
            trapping_scan(&h0, &v, &[1.0, 0.5]),
            Err(Error::InvalidParameterGrid)
        ));
    }

    /// Lower level at `a + bE`; the upper level moves with it so the branches never meet.
    fn linear_family(a: f64, b: f64) -> impl Fn(f64) -> Result<EffectiveHamiltonian> {
        move |e: f64| {
            EffectiveHamiltonian::new(
                DMatrix::from_row_slice(2, 2, &[a + b * e, 0.0, 0.0, a + b * e + 1e3]),
                vec![DVector::from_column_slice(&[1.0, 0.0])],
                0.02,
            )
        }
    }

    #[test]
    fn fixed_point_energy_independent() {
        let family = linear_family(3.0, 0.0);
        let fp = fixed_point_solve(&family, 0, 0.0).unwrap();
        assert!((fp.energy - 3.0).abs() < 1e-10);
        assert!((fp.width - 0.02).abs() < 1e-14);
    }

    #[test]
    fn fixed_point_contraction() {
        for b in [-2.5, -1.0, -0.5, 0.3, 0.9] {
            let fp = fixed_point_solve(&linear_family(2.0, b), 0, 0.0).unwrap();
            assert!((fp.energy - 2.0 / (1.0 - b)).abs() < 1e-9, "b = {b}: {}", fp.energy);
        }
    }

    #[test]
    fn fixed_point_diverges_without_contraction() {
        for b in [1.0, 1.5, -3.0, -5.0] {
            let result = fixed_point_solve(&linear_family(2.0, b), 0, 0.0);
            assert!(
                matches!(result, Err(Error::NonConvergence { .. })),
                "b = {b}: {result:?}"
            );
        }
    }

    #[test]
    fn fixed_point_bad_index() {
        assert!(fixed_point_solve(&linear_family(2.0, 0.0), 5, 0.0).is_err());
    }

    #[test]
    fn quadratic_oracle_thousand_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let h = random_hamiltonian(&mut rng, 2, 1);
            let m = h.assemble();
            let values = eigenvalues(&m).unwrap();
            for root in quadratic_roots(&m) {
                let nearest = values.iter().map(|z| (z - root).norm()).fold(f64::INFINITY, f64::min);
                let gap = (values[0] - values[1]).norm();
                // Close to coalescence both routes lose digits like sqrt(eps).
                if gap > 1e-3 {
                    assert!(nearest < 1e-12, "{nearest:e}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn spectrum_invariants(seed in any::<u64>(), n in 2usize..=8, channels in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hamiltonian(&mut rng, n, channels);
            let spec = match eigensolve_biorthogonal(&h) {
                Err(Error::NearDefective { .. }) => return Ok(()),
                other => other.unwrap(),
            };
            let widths = spec.widths();
            let max_width = widths.iter().copied().fold(0.0, f64::max);
            prop_assert!(spec.biorthogonality_residual() < 1e-10 * spec.a_norms.iter().copied().fold(1.0, f64::max));
            for (k, (&a_norm, &width)) in spec.a_norms.iter().zip(&widths).enumerate() {
                prop_assert!(a_norm >= 1.0 - 1e-10);
                prop_assert!(width >= -1e-10);
                let partial: f64 = spec.gammas.row(k).iter().map(|g| g.norm_sqr()).sum();
                prop_assert!(width <= partial + 1e-10);
            }
            for r in width_sum_rule_check(&spec) {
                prop_assert!(r <= 1e-10 * max_width.max(1e-300));
            }
            let trace: Complex64 = spec.eigenvalues.iter().sum();
            let expected = h.assemble().trace();
            prop_assert!((trace - expected).norm() <= 1e-10 * expected.norm().max(1.0));
            let total: f64 = widths.iter().sum();
            prop_assert!((total - h.alpha() * h.coupling_norm_sqr()).abs() <= 1e-10 * (h.alpha() * h.coupling_norm_sqr()).max(1.0));
        }

        #[test]
        fn two_level_overlap_is_imaginary(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hamiltonian(&mut rng, 2, 1);
            if let Ok(spec) = eigensolve_biorthogonal(&h) {
                let kl = spec.hermitian_overlap(0, 1);
                let lk = spec.hermitian_overlap(1, 0);
                let scale = spec.a_norms[0].max(spec.a_norms[1]);
                prop_assert!(kl.re.abs() < 1e-10 * scale);
                prop_assert!((kl + lk).norm() < 1e-10 * scale);
            }
        }
    }
}
