//! Unwrapped phase of a sampled coupling coefficient and jump detection at its zeros.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::smatrix::CouplingProfile;

/// A dip is where `|W| < JUMP_FLOOR_RELATIVE * Γ_k`; the phase is undefined there.
pub const JUMP_FLOOR_RELATIVE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseJump {
    /// Energy of the smallest `|W|` inside the dip.
    pub energy: f64,
    /// Phase difference between the samples flanking the dip, in `(-π, π]`.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub state_index: usize,
    pub energies: Vec<f64>,
    pub unwrapped_phase: Vec<f64>,
    pub jumps: Vec<PhaseJump>,
}

impl PhaseProfile {
    /// Unwrapped phase at the last sample minus the first.
    pub fn total_change(&self) -> f64 {
        total_change(self)
    }
}

pub fn total_change(profile: &PhaseProfile) -> f64 {
    match (profile.unwrapped_phase.first(), profile.unwrapped_phase.last()) {
        (Some(first), Some(last)) => last - first,
        _ => 0.0,
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_to_pi(angle: f64) -> f64 {
    let wrapped = angle - TAU * (angle / TAU).round();
    if wrapped <= -PI {
        wrapped + TAU
    } else if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Accumulates wrapped adjacent differences, starting from `phases[0]`.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut previous: Option<(f64, f64)> = None;
    for &raw in phases {
        let value = match previous {
            None => raw,
            Some((prev_raw, prev_value)) => prev_value + wrap_to_pi(raw - prev_raw),
        };
        out.push(value);
        previous = Some((raw, value));
    }
    out
}

/// Unwraps `arg W` along the profile. Samples inside a dip hold the last
/// defined phase; leaving a dip applies the flank-to-flank difference at once
/// and records it as a jump. Dips touching either end of the grid are held
/// flat without a jump.
pub fn phase_profile(coupling: &CouplingProfile) -> Result<PhaseProfile> {
    let samples = &coupling.samples;
    if samples.len() < 2 {
        return Err(Error::EmptyProfile(samples.len()));
    }
    let floor = JUMP_FLOOR_RELATIVE * coupling.reference_width;

    let mut unwrapped = Vec::with_capacity(samples.len());
    let mut jumps = Vec::new();
    // Index of the last sample outside any dip.
    let mut anchor: Option<usize> = None;
    // Index of the smallest |W| in the current dip.
    let mut dip_min: Option<usize> = None;

    for (i, &(_, w)) in samples.iter().enumerate() {
        let magnitude = w.norm();
        if magnitude < floor {
            let held = unwrapped.last().copied().unwrap_or(0.0);
            unwrapped.push(held);
            dip_min = match dip_min {
                Some(j) if samples[j].1.norm() <= magnitude => Some(j),
                _ => Some(i),
            };
            continue;
        }
        let value = match anchor {
            None => w.arg(),
            Some(a) => {
                let step = wrap_to_pi(w.arg() - samples[a].1.arg());
                if let Some(j) = dip_min {
                    jumps.push(PhaseJump {
                        energy: samples[j].0,
                        magnitude: step,
                    });
                }
                unwrapped[a] + step
            }
        };
        unwrapped.push(value);
        anchor = Some(i);
        dip_min = None;
    }

    Ok(PhaseProfile {
        state_index: coupling.state_index,
        energies: samples.iter().map(|&(e, _)| e).collect(),
        unwrapped_phase: unwrapped,
        jumps,
    })
}
