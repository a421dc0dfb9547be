//! Resonances, pole sets and energy grids.
//!
//! Energies and widths are dimensionless. Widths are always full widths;
//! formulas that need half-widths divide by two explicitly.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value type for S-matrix elements, coupling coefficients and mixing amplitudes.
pub type ComplexAmplitude = Complex64;

/// One pole of the S matrix at `position - i * width / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    position: f64,
    width: f64,
}

impl Resonance {
    pub fn new(position: f64, width: f64) -> Result<Self> {
        if !position.is_finite() {
            return Err(Error::InvalidPosition(position));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidWidth(width));
        }
        Ok(Self { position, width })
    }

    pub fn position(&self) -> f64 {
        self.position
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Complex energy `E - i Γ/2` of the pole.
    pub fn complex_energy(&self) -> Complex64 {
        Complex64::new(self.position, -0.5 * self.width)
    }

    /// `X = E - Ẽ + i Γ/2`, the denominator attached to this pole.
    #[inline]
    pub fn pole_distance(&self, energy: f64) -> Complex64 {
        Complex64::new(energy - self.position, 0.5 * self.width)
    }
}

/// Ordered, non-empty list of poles. Repeated identical entries encode
/// double and triple poles.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    resonances: Vec<Resonance>,
}

impl PoleSet {
    pub fn new(resonances: Vec<Resonance>) -> Result<Self> {
        if resonances.is_empty() {
            return Err(Error::EmptyPoleSet);
        }
        Ok(Self { resonances })
    }

    /// Builds a pole set from `(position, width)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let resonances = pairs
            .iter()
            .map(|&(position, width)| Resonance::new(position, width))
            .collect::<Result<Vec<_>>>()?;
        Self::new(resonances)
    }

    /// `order` coincident copies of `pole`.
    pub fn multiple(pole: Resonance, order: usize) -> Result<Self> {
        Self::new(vec![pole; order])
    }

    pub fn len(&self) -> usize {
        self.resonances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resonances.is_empty()
    }

    pub fn get(&self, index: usize) -> Result<&Resonance> {
        self.resonances.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.resonances.len(),
        })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Resonance> {
        self.resonances.iter()
    }

    pub fn as_slice(&self) -> &[Resonance] {
        &self.resonances
    }
}

impl<'a> IntoIterator for &'a PoleSet {
    type Item = &'a Resonance;
    type IntoIter = std::slice::Iter<'a, Resonance>;

    fn into_iter(self) -> Self::IntoIter {
        self.resonances.iter()
    }
}

/// Uniform grid of `points` energies from `min` to `max`, both included exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    min: f64,
    max: f64,
    points: usize,
}

impl EnergyGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max && points >= 2) {
            return Err(Error::InvalidRange { min, max, points });
        }
        Ok(Self { min, max, points })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    /// Sample `index`; the last index returns `max` exactly.
    pub fn sample(&self, index: usize) -> f64 {
        debug_assert!(index < self.points);
        if index + 1 == self.points {
            self.max
        } else {
            self.min + (self.max - self.min) * index as f64 / (self.points - 1) as f64
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.sample(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }
}

pub fn make_grid(min: f64, max: f64, points: usize) -> Result<EnergyGrid> {
    EnergyGrid::new(min, max, points)
}
