//! Deterministic fixtures shared by the benchmarks.

use respole::{DMatrix, DVector, EffectiveHamiltonian, LinearFamily, PoleSet};

/// `n` overlapping poles spread over `[7, 9]` with widths from 0.01 to 1.
pub fn overlapping_poles(n: usize) -> PoleSet {
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = i as f64 / (n.max(2) - 1) as f64;
            (7.0 + 2.0 * t, 0.01 * 100f64.powf(t))
        })
        .collect();
    PoleSet::from_pairs(&pairs).expect("valid fixture")
}

/// Dense `n`-state Hamiltonian with `channels` decay channels and no symmetry
/// beyond the required one.
pub fn dense_hamiltonian(n: usize, channels: usize, alpha: f64) -> EffectiveHamiltonian {
    let h0 = DMatrix::from_fn(n, n, |i, j| {
        let (i, j) = (i.min(j) as f64, i.max(j) as f64);
        if i == j {
            i
        } else {
            0.3 * (1.7 * i + 2.3 * j).cos()
        }
    });
    let couplings = (0..channels)
        .map(|c| DVector::from_fn(n, |i, _| ((c + 1) as f64 * 0.9 * i as f64 + 0.4).sin()))
        .collect();
    EffectiveHamiltonian::new(h0, couplings, alpha).expect("valid fixture")
}

/// Two-level loss family with its coalescence at `a = 1`.
pub fn loss_family() -> LinearFamily {
    LinearFamily::two_level_loss(0.5).expect("valid fixture")
}
