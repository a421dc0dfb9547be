//! One-channel unitary S matrix: product form, pole form and the
//! energy-dependent coupling coefficients that make the pole form unitary.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{EnergyGrid, PoleSet, Resonance};

/// Magnitude below which an elementary symmetric denominator is treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `Π_n (E - Ẽ_n - iΓ_n/2) / (E - Ẽ_n + iΓ_n/2)`.
pub fn s_product(poles: &PoleSet, energy: f64) -> Complex64 {
    poles.iter().fold(Complex64::new(1.0, 0.0), |s, pole| {
        let x = pole.pole_distance(energy);
        s * x.conj() / x
    })
}

/// S multiplied by a constant background phase factor `exp(i φ)`.
pub fn s_with_background(poles: &PoleSet, energy: f64, background_phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, background_phase) * s_product(poles, energy)
}

/// Closed-form coupling coefficient of pole `k` in the presence of pole `l`.
pub fn coupling_w_two(pole_k: &Resonance, pole_l: &Resonance, energy: f64) -> Complex64 {
    let denominator = Complex64::new(
        2.0 * energy - (pole_k.position() + pole_l.position()),
        0.5 * (pole_k.width() + pole_l.width()),
    );
    pole_k.width() * (1.0 - I * pole_l.width() / denominator)
}

/// Coupling coefficient of pole `n` for an arbitrary pole set.
///
/// Sums over every subset `M` of the other poles the term
/// `(-i)^|M| Π_{m∈M} Γ_m / e_|M|(X over M ∪ {n})`. The cost grows as
/// `2^(N-1)`, which is fine for the handful of poles this is meant for.
pub fn coupling_w_n(poles: &PoleSet, n: usize, energy: f64) -> Result<Complex64> {
    let target = poles.get(n)?;
    let x: Vec<Complex64> = poles.iter().map(|p| p.pole_distance(energy)).collect();
    let others: Vec<usize> = (0..poles.len()).filter(|&m| m != n).collect();

    let mut members: Vec<Complex64> = Vec::with_capacity(poles.len());
    let mut series = Complex64::new(0.0, 0.0);
    for mask in 0u64..(1u64 << others.len()) {
        members.clear();
        members.push(x[n]);
        let mut width_product = 1.0;
        for (bit, &m) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                members.push(x[m]);
                width_product *= poles.as_slice()[m].width();
            }
        }
        let order = members.len() - 1;
        let denominator = elementary_symmetric(&members, order);
        let magnitude = denominator.norm();
        if magnitude.is_nan() || magnitude < DENOMINATOR_FLOOR {
            return Err(Error::DegenerateDenominator { order, magnitude });
        }
        series += minus_i_pow(order) * width_product / denominator;
    }
    Ok(target.width() * series)
}

/// `1 - i Σ_n W_n / X_n`; agrees with [`s_product`] up to rounding.
pub fn s_pole_form(poles: &PoleSet, energy: f64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, pole) in poles.iter().enumerate() {
        sum += coupling_w_n(poles, n, energy)? / pole.pole_distance(energy);
    }
    Ok(1.0 - I * sum)
}

/// Explicit form of S for two coincident poles.
pub fn s_double_pole(pole: &Resonance, energy: f64) -> Complex64 {
    let x = pole.pole_distance(energy);
    let gamma = pole.width();
    1.0 - 2.0 * I * gamma / x - gamma * gamma / (x * x)
}

/// Energy-independent coupling of pole `k`; singular when the poles coincide.
pub fn coupling_w_fano(pole_k: &Resonance, pole_l: &Resonance) -> Result<Complex64> {
    if pole_k.position() == pole_l.position() && pole_k.width() == pole_l.width() {
        return Err(Error::DoublePoleSingularity);
    }
    let denominator = Complex64::new(
        pole_k.position() - pole_l.position(),
        -0.5 * (pole_k.width() - pole_l.width()),
    );
    Ok(pole_k.width() * (1.0 - I * pole_l.width() / denominator))
}

/// `σ(E) = |1 - S(E)|²` on every grid point.
pub fn cross_section(poles: &PoleSet, grid: &EnergyGrid) -> Vec<(f64, f64)> {
    cross_section_with_background(poles, grid, 0.0)
}

/// Cross section with S rotated by a constant background phase.
pub fn cross_section_with_background(poles: &PoleSet, grid: &EnergyGrid, background_phase: f64) -> Vec<(f64, f64)> {
    let rotation = Complex64::from_polar(1.0, background_phase);
    grid.iter()
        .map(|e| (e, (1.0 - rotation * s_product(poles, e)).norm_sqr()))
        .collect()
}

/// `W_k(E)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    pub state_index: usize,
    /// Width of the pole the profile belongs to; sets the scale of the jump floor.
    pub reference_width: f64,
    pub samples: Vec<(f64, Complex64)>,
}

impl CouplingProfile {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn coupling_profile(poles: &PoleSet, n: usize, grid: &EnergyGrid) -> Result<CouplingProfile> {
    let reference_width = poles.get(n)?.width();
    let samples = grid
        .iter()
        .map(|e| coupling_w_n(poles, n, e).map(|w| (e, w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingProfile {
        state_index: n,
        reference_width,
        samples,
    })
}

/// Constant profile of the energy-independent coupling of `pole_k` against `pole_l`.
pub fn fano_profile(
    pole_k: &Resonance,
    pole_l: &Resonance,
    state_index: usize,
    grid: &EnergyGrid,
) -> Result<CouplingProfile> {
    let w = coupling_w_fano(pole_k, pole_l)?;
    Ok(CouplingProfile {
        state_index,
        reference_width: pole_k.width(),
        samples: grid.iter().map(|e| (e, w)).collect(),
    })
}

/// Degree-`degree` elementary symmetric polynomial of `values`.
pub(crate) fn elementary_symmetric(values: &[Complex64], degree: usize) -> Complex64 {
    let mut e = vec![Complex64::new(0.0, 0.0); degree + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &v in values {
        for d in (1..=degree).rev() {
            let lower = e[d - 1];
            e[d] += lower * v;
        }
    }
    e[degree]
}

fn minus_i_pow(power: usize) -> Complex64 {
    match power % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn res(position: f64, width: f64) -> Resonance {
        Resonance::new(position, width).unwrap()
    }

    fn poles(pairs: &[(f64, f64)]) -> PoleSet {
        PoleSet::from_pairs(pairs).unwrap()
    }

    /// Expands `Π (E - z_n*)/(E - z_n)` by partial fractions with explicit
    /// residues at the poles `z_n`, independently of the subset series.
    /// Valid for distinct poles only.
    fn partial_fraction_oracle(set: &PoleSet, energy: f64) -> Complex64 {
        let zs: Vec<Complex64> = set.iter().map(|p| p.complex_energy()).collect();
        let mut s = Complex64::new(1.0, 0.0);
        for (n, &pole) in zs.iter().enumerate() {
            let mut residue = pole - pole.conj();
            for (m, zm) in zs.iter().enumerate() {
                if m != n {
                    residue *= (pole - zm.conj()) / (pole - zm);
                }
            }
            s += residue / (energy - pole);
        }
        s
    }

    #[test]
    fn single_pole_on_resonance_is_minus_one() {
        let s = s_product(&poles(&[(8.0, 0.05)]), 8.0);
        assert!((s + 1.0).norm() < 1e-15);
    }

    #[test]
    fn single_pole_far_away_tends_to_one() {
        let s = s_product(&poles(&[(8.0, 0.05)]), 8.0 + 1e6 * 0.05);
        assert!((s - 1.0).norm() < 1e-5);
    }

    #[test]
    fn symmetric_pair_gives_unity_at_midpoint() {
        let set = poles(&[(7.99, 0.05), (8.01, 0.05)]);
        let numerator: Complex64 = set.iter().map(|p| p.pole_distance(8.0).conj()).product();
        assert!((numerator - Complex64::new(-7.25e-4, 0.0)).norm() < 1e-12 * 7.25e-4);
        assert!((s_product(&set, 8.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn w_two_vanishes_at_midpoint_for_equal_widths() {
        let (k, l) = (res(7.99, 0.05), res(8.01, 0.05));
        assert_eq!(coupling_w_two(&k, &l, 8.0).norm(), 0.0);
    }

    #[test]
    fn w_two_coincident_positions() {
        let (g1, g2) = (5.0, 0.01);
        let (p1, p2) = (res(8.0, g1), res(8.0, g2));
        let w1 = coupling_w_two(&p1, &p2, 8.0);
        let w2 = coupling_w_two(&p2, &p1, 8.0);
        assert!((w1 - g1 * (g1 - g2) / (g1 + g2)).norm() < 1e-14);
        assert!((w1.re - g1).abs() < 0.01 * g1);
        assert!((w2.re + g2).abs() < 0.01 * g2);
    }

    #[test]
    fn w_two_far_from_resonance() {
        let (k, l) = (res(7.99, 0.05), res(8.01, 0.5));
        let w = coupling_w_two(&k, &l, 7.99 + 1e4 * 0.55);
        assert!((w - 0.05).norm() < 1e-3 * 0.05);
    }

    #[test]
    fn w_two_real_part_minimum_at_midpoint() {
        let (k, l) = (res(7.99, 0.3), res(8.01, 0.05));
        let w = coupling_w_two(&k, &l, 8.0);
        assert!(w.im.abs() < 1e-15);
        assert!((w.re - 0.3 * 0.25 / 0.35).abs() < 1e-14);
        for e in [7.9, 7.99, 7.999, 8.001, 8.05, 9.0] {
            assert!(coupling_w_two(&k, &l, e).re > w.re);
        }
    }

    #[test]
    fn w_two_midpoint_minimum_for_separated_widths() {
        // Broad state: minimum near Γ_k - Γ_l ≈ Γ_k. Narrow state: near -Γ_l.
        let (broad, narrow) = (res(7.99, 5.0), res(8.01, 0.01));
        let wb = coupling_w_two(&broad, &narrow, 8.0).re;
        let wn = coupling_w_two(&narrow, &broad, 8.0).re;
        assert!((wb - (5.0 - 0.01)).abs() < 0.01 * 5.0);
        assert!((wn + 0.01).abs() < 0.01 * 0.01);
    }

    #[test]
    fn w_n_single_pole_is_width() {
        let set = poles(&[(8.0, 0.37)]);
        for e in [-3.0, 8.0, 8.1, 1e5] {
            assert_eq!(coupling_w_n(&set, 0, e).unwrap(), Complex64::new(0.37, 0.0));
        }
    }

    #[test]
    fn w_n_multiple_poles() {
        let d = res(8.0, 0.05);
        let double = PoleSet::multiple(d, 2).unwrap();
        let triple = PoleSet::multiple(d, 3).unwrap();
        for n in 0..2 {
            assert!(coupling_w_n(&double, n, 8.0).unwrap().norm() < 1e-15);
        }
        for n in 0..3 {
            let w = coupling_w_n(&triple, n, 8.0).unwrap();
            assert!((w - 0.05 / 3.0).norm() < 1e-15);
        }
    }

    #[test]
    fn w_n_rejects_bad_index() {
        assert!(matches!(
            coupling_w_n(&poles(&[(8.0, 0.1)]), 1, 8.0),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn w_n_three_poles_matches_truncated_series() {
        // Explicit three-term series for N = 3.
        let set = poles(&[(7.9, 0.2), (8.1, 0.05), (8.0, 1.0)]);
        let e = 8.03;
        let x: Vec<Complex64> = set.iter().map(|p| p.pole_distance(e)).collect();
        let g: Vec<f64> = set.iter().map(|p| p.width()).collect();
        let explicit = g[0]
            * (1.0
                - I * g[1] / (x[0] + x[1])
                - I * g[2] / (x[0] + x[2])
                - g[1] * g[2] / (x[0] * x[1] + x[0] * x[2] + x[1] * x[2]));
        assert!((coupling_w_n(&set, 0, e).unwrap() - explicit).norm() < 1e-15);
    }

    #[test]
    fn pole_form_single_pole() {
        let set = poles(&[(3.0, 0.7)]);
        for e in [-10.0, 2.5, 3.0, 3.35, 40.0] {
            assert!((s_pole_form(&set, e).unwrap() - s_product(&set, e)).norm() < 1e-14);
        }
    }

    #[test]
    fn pole_form_figure_one_parameters() {
        let set = poles(&[(7.99, 0.05), (8.01, 5.0)]);
        let grid = EnergyGrid::new(6.0, 10.0, 2001).unwrap();
        for e in grid.iter() {
            let diff = (s_pole_form(&set, e).unwrap() - s_product(&set, e)).norm();
            assert!(diff < 1e-10, "E = {e}: {diff:e}");
        }
    }

    #[test]
    fn pole_form_three_separated_poles() {
        let set = poles(&[(7.75, 0.05), (8.25, 0.05), (8.0, 0.05)]);
        let grid = EnergyGrid::new(7.0, 9.0, 2001).unwrap();
        for e in grid.iter() {
            let diff = (s_pole_form(&set, e).unwrap() - s_product(&set, e)).norm();
            assert!(diff < 1e-10);
            assert!((partial_fraction_oracle(&set, e) - s_product(&set, e)).norm() < 1e-10);
        }
    }

    #[test]
    fn double_pole_form() {
        let d = res(8.0, 0.05);
        assert!((s_double_pole(&d, 8.0) - 1.0).norm() < 1e-14);
        assert!((s_double_pole(&d, 1e9) - 1.0).norm() < 1e-9);
        assert!((s_double_pole(&d, -1e9) - 1.0).norm() < 1e-9);
        let pair = PoleSet::multiple(d, 2).unwrap();
        for e in EnergyGrid::new(6.0, 10.0, 4001).unwrap().iter() {
            assert!((s_double_pole(&d, e) - s_product(&pair, e)).norm() < 1e-13);
        }
    }

    #[test]
    fn fano_coupling() {
        let w = coupling_w_fano(&res(7.99, 0.05), &res(8.01, 0.05)).unwrap();
        assert!((w - Complex64::new(0.05, 0.125)).norm() < 1e-12);

        let far = coupling_w_fano(&res(0.0, 0.05), &res(5e2, 0.05)).unwrap();
        assert!((far - 0.05).norm() < 1e-3 * 0.05);

        assert_eq!(
            coupling_w_fano(&res(8.0, 0.05), &res(8.0, 0.05)),
            Err(Error::DoublePoleSingularity)
        );
    }

    #[test]
    fn cross_section_features() {
        let single = poles(&[(8.0, 0.05)]);
        let grid = EnergyGrid::new(7.0, 9.0, 2001).unwrap();
        let peak = cross_section(&single, &grid)[1000];
        assert_eq!(peak.0, 8.0);
        assert!((peak.1 - 4.0).abs() < 1e-14);

        let equal = poles(&[(7.99, 0.05), (8.01, 0.05)]);
        let sigma = cross_section(&equal, &EnergyGrid::new(6.0, 10.0, 4001).unwrap());
        assert_eq!(sigma[2000].0, 8.0);
        assert!(sigma[2000].1 < 1e-12);

        let dashed = poles(&[(7.99, 0.05), (8.01, 5.0)]);
        let grid = EnergyGrid::new(6.0, 10.0, 4001).unwrap();
        let sigma = cross_section(&dashed, &grid);
        let i = sigma
            .windows(3)
            .position(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
            .map(|i| i + 1)
            .unwrap();
        assert!((sigma[i].0 - 7.99).abs() <= grid.spacing() + 1e-12);
    }

    #[test]
    fn background_phase_rotates_s() {
        let set = poles(&[(8.0, 0.05)]);
        let grid = EnergyGrid::new(7.0, 9.0, 11).unwrap();
        assert_eq!(
            cross_section_with_background(&set, &grid, 0.0),
            cross_section(&set, &grid)
        );
        let shifted = cross_section_with_background(&set, &grid, std::f64::consts::PI);
        // exp(iπ) S = 1 on resonance, so the cross section vanishes there.
        assert!(shifted[5].1 < 1e-28);
    }

    fn pole_sets(max: usize) -> impl Strategy<Value = PoleSet> {
        prop::collection::vec((-5.0f64..5.0, 1e-3f64..10.0), 1..=max)
            .prop_map(|pairs| PoleSet::from_pairs(&pairs).unwrap())
    }

    proptest! {
        #[test]
        fn unitarity(set in pole_sets(6), e in -20.0f64..20.0) {
            prop_assert!((s_product(&set, e).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pole_form_matches_product(set in pole_sets(6), e in -20.0f64..20.0) {
            let diff = (s_pole_form(&set, e).unwrap() - s_product(&set, e)).norm();
            prop_assert!(diff < 1e-10, "{diff:e}");
        }

        #[test]
        fn two_pole_series_equals_closed_form(set in pole_sets(2).prop_filter("two poles", |s| s.len() == 2), e in -20.0f64..20.0) {
            let (a, b) = (set.as_slice()[0], set.as_slice()[1]);
            let series = coupling_w_n(&set, 0, e).unwrap();
            let closed = coupling_w_two(&a, &b, e);
            prop_assert!((series - closed).norm() <= 1e-15 * closed.norm().max(a.width()));
        }

        #[test]
        fn midpoint_imaginary_part_vanishes(p in -5.0f64..5.0, d in 0.0f64..2.0, gk in 1e-3f64..10.0, gl in 1e-3f64..10.0) {
            let (k, l) = (res(p - d, gk), res(p + d, gl));
            let w = coupling_w_two(&k, &l, ((p - d) + (p + d)) / 2.0);
            prop_assert!(w.im.abs() <= 1e-12 * gk);
            prop_assert!((w.re - gk * (gk - gl) / (gk + gl)).abs() <= 1e-12 * (gk + gl));
        }

        #[test]
        fn couplings_approach_widths(set in pole_sets(4), sign in prop::bool::ANY) {
            let far = if sign { 1e7 } else { -1e7 };
            for n in 0..set.len() {
                let gamma = set.as_slice()[n].width();
                let near = (coupling_w_n(&set, n, far / 1e3).unwrap() - gamma).norm();
                let distant = (coupling_w_n(&set, n, far).unwrap() - gamma).norm();
                // O(1/E): three decades in E buy roughly three decades in the error.
                prop_assert!(distant <= 2e-3 * near + 1e-12 * gamma);
            }
        }

        #[test]
        fn cross_section_bounded(set in pole_sets(6)) {
            let grid = EnergyGrid::new(-10.0, 10.0, 257).unwrap();
            for (_, sigma) in cross_section(&set, &grid) {
                prop_assert!((0.0..=4.0 + 1e-12).contains(&sigma));
            }
        }

        #[test]
        fn symmetric_pair_zero(center in -5.0f64..5.0, half in 0.0f64..3.0, width in 1e-3f64..10.0) {
            let set = PoleSet::from_pairs(&[(center - half, width), (center + half, width)]).unwrap();
            // Positions are rounded, so the midpoint is recomputed from them.
            let mid = (set.as_slice()[0].position() + set.as_slice()[1].position()) / 2.0;
            let grid = EnergyGrid::new(mid, mid + 1.0, 2).unwrap();
            prop_assert!(cross_section(&set, &grid)[0].1 < 1e-20);
        }
    }
}
