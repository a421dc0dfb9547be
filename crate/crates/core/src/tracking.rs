//! Continuity tracking of eigenpairs along a one-parameter family and
//! detection of the points where two eigenvalues come closest.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::effham::{biorthogonal_normalize, fix_sign, EffectiveHamiltonian};
use crate::eigen::{eigen_decompose, eigenvalues};
use crate::error::{Error, Result};

/// Coalescence when the refined distance is below this fraction of the spectral diameter.
pub const COALESCENCE_RELATIVE: f64 = 1e-6;
/// Eigenvalue matching is decisive when the runner-up is farther by this factor.
const MATCH_MARGIN: f64 = 1e-3;
/// Vector matching is decisive when the best overlap beats the runner-up by this much.
const OVERLAP_MARGIN: f64 = 0.5;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// A matrix-valued function of one real parameter.
pub trait HamiltonianFamily {
    fn at(&self, parameter: f64) -> Result<EffectiveHamiltonian>;
}

impl<F> HamiltonianFamily for F
where
    F: Fn(f64) -> Result<EffectiveHamiltonian>,
{
    fn at(&self, parameter: f64) -> Result<EffectiveHamiltonian> {
        self(parameter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingKind {
    /// Energies stay apart while widths cross.
    Repulsion,
    /// Widths stay apart while energies cross.
    Attraction,
    /// Both differences vanish.
    Coalescence,
}

impl CrossingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Repulsion => "repulsion",
            Self::Attraction => "attraction",
            Self::Coalescence => "coalescence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub parameter: f64,
    pub kind: CrossingKind,
    /// Paths that come closest, smaller index first.
    pub states: (usize, usize),
    /// `|λ_k - λ_l|` at `parameter`.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct SweepTrajectory {
    pub parameter_samples: Vec<f64>,
    /// `eigenvalue_paths[k][s]` is state `k` at sample `s`.
    pub eigenvalue_paths: Vec<Vec<Complex64>>,
    /// Bi-orthogonally normalized where possible, else unit 2-norm (see `defective`).
    pub eigenvector_paths: Vec<Vec<DVector<Complex64>>>,
    /// `defective[k][s]` marks samples where state `k` could not be normalized bi-orthogonally.
    pub defective: Vec<Vec<bool>>,
    pub critical_points: Vec<CriticalPoint>,
}

impl SweepTrajectory {
    pub fn len(&self) -> usize {
        self.parameter_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameter_samples.is_empty()
    }

    pub fn states(&self) -> usize {
        self.eigenvalue_paths.len()
    }

    /// `A_k = Σ|Φ_k,i|²`, infinite at defective samples.
    pub fn a_norm(&self, state: usize, sample: usize) -> f64 {
        if self.defective[state][sample] {
            f64::INFINITY
        } else {
            self.eigenvector_paths[state][sample].norm_squared()
        }
    }

    /// Sample index closest to `parameter`.
    pub fn nearest_sample(&self, parameter: f64) -> usize {
        let mut best = 0;
        for (s, a) in self.parameter_samples.iter().enumerate() {
            if (a - parameter).abs() < (self.parameter_samples[best] - parameter).abs() {
                best = s;
            }
        }
        best
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    let finite = grid.iter().all(|a| a.is_finite());
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    if grid.len() < 2 || !finite || !increasing {
        return Err(Error::InvalidParameterGrid);
    }
    Ok(())
}

/// Tracks every eigenpair of `family` over `grid`, then locates and classifies
/// local minima of the smallest pairwise eigenvalue distance.
pub(crate) fn sweep_family<F: HamiltonianFamily + ?Sized>(family: &F, grid: &[f64]) -> Result<SweepTrajectory> {
    validate_grid(grid)?;
    let mut values_paths: Vec<Vec<Complex64>> = Vec::new();
    let mut vector_paths: Vec<Vec<DVector<Complex64>>> = Vec::new();
    let mut defective: Vec<Vec<bool>> = Vec::new();
    let mut previous_units: Vec<DVector<Complex64>> = Vec::new();

    for (s, &a) in grid.iter().enumerate() {
        let eig = eigen_decompose(&family.at(a)?.assemble())?;
        let n = eig.values.len();
        let order: Vec<usize> = if s == 0 {
            values_paths = vec![Vec::with_capacity(grid.len()); n];
            vector_paths = vec![Vec::with_capacity(grid.len()); n];
            defective = vec![Vec::with_capacity(grid.len()); n];
            (0..n).collect()
        } else {
            if n != values_paths.len() {
                return Err(Error::DimensionMismatch {
                    expected: values_paths.len(),
                    actual: n,
                });
            }
            let predicted: Vec<Complex64> = values_paths.iter().map(|path| predict(path, &grid[..s], a)).collect();
            assign(&predicted, &previous_units, &eig.values, &eig.vectors)
                .ok_or(Error::TrackingAmbiguity { parameter: a })?
        };

        for (k, &j) in order.iter().enumerate() {
            let unit = &eig.vectors[j];
            let (mut phi, is_defective) = match biorthogonal_normalize(unit) {
                Some(phi) => (phi, false),
                None => (unit.clone(), true),
            };
            match vector_paths[k].last() {
                None => fix_sign(&mut phi),
                Some(previous) => align_sign(previous, &mut phi),
            }
            values_paths[k].push(eig.values[j]);
            vector_paths[k].push(phi);
            defective[k].push(is_defective);
        }
        previous_units = order.iter().map(|&j| eig.vectors[j].clone()).collect();
    }

    let critical_points = detect_critical(family, grid, &values_paths)?;
    Ok(SweepTrajectory {
        parameter_samples: grid.to_vec(),
        eigenvalue_paths: values_paths,
        eigenvector_paths: vector_paths,
        defective,
        critical_points,
    })
}

/// Linear extrapolation from the last two samples of a path.
fn predict(path: &[Complex64], parameters: &[f64], next: f64) -> Complex64 {
    let s = path.len();
    if s < 2 {
        return path[s - 1];
    }
    let slope = (path[s - 1] - path[s - 2]) / (parameters[s - 1] - parameters[s - 2]);
    path[s - 1] + slope * (next - parameters[s - 1])
}

/// Greedy assignment minimizing `cost[i][j]`; `result[i]` is the column chosen for row `i`.
fn greedy(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    let mut entries: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push((cost[(i, j)], i, j));
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut result = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in entries {
        if result[i] == usize::MAX && !taken[j] {
            result[i] = j;
            taken[j] = true;
        }
    }
    result
}

/// Runner-up cost minus chosen cost for each row.
fn margins(cost: &DMatrix<f64>, assignment: &[usize]) -> Vec<(f64, f64)> {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let chosen = cost[(i, j)];
            let runner_up = (0..cost.ncols())
                .filter(|&m| m != j)
                .map(|m| cost[(i, m)])
                .fold(f64::INFINITY, f64::min);
            (chosen, runner_up)
        })
        .collect()
}

/// Matches paths to new eigenpairs. Eigenvalue proximity to the prediction
/// decides unless two candidates are nearly equidistant, in which case the
/// vector overlap decides. `None` when both criteria are decisive and disagree.
fn assign(
    predicted: &[Complex64],
    previous_units: &[DVector<Complex64>],
    values: &[Complex64],
    vectors: &[DVector<Complex64>],
) -> Option<Vec<usize>> {
    let n = values.len();
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let distance = DMatrix::from_fn(n, n, |i, j| (predicted[i] - values[j]).norm());
    let overlap = DMatrix::from_fn(n, n, |i, j| previous_units[i].dotc(&vectors[j]).norm());

    let by_value = greedy(&distance);
    let by_vector = greedy(&overlap.map(|x| -x));
    if by_value == by_vector {
        return Some(by_value);
    }
    let value_decisive = margins(&distance, &by_value)
        .iter()
        .all(|&(d1, d2)| d2 > (1.0 + MATCH_MARGIN) * d1 + 1e-12 * scale);
    if !value_decisive {
        return Some(by_vector);
    }
    let vector_decisive = margins(&overlap.map(|x| -x), &by_vector)
        .iter()
        .all(|&(best, runner_up)| runner_up - best > OVERLAP_MARGIN);
    if vector_decisive {
        None
    } else {
        Some(by_value)
    }
}

/// Flips `next` so that it continues `previous` with non-negative real overlap.
fn align_sign(previous: &DVector<Complex64>, next: &mut DVector<Complex64>) {
    let bilinear = previous.dot(next);
    let overlap = if bilinear.norm() > 1e-3 * previous.norm() * next.norm() {
        bilinear
    } else {
        previous.dotc(next)
    };
    if overlap.re < 0.0 {
        next.neg_mut();
    }
}

/// Smallest pairwise distance and the pair achieving it.
pub(crate) fn closest_pair(values: &[Complex64]) -> (f64, (usize, usize)) {
    let mut best = (f64::INFINITY, (0, 1));
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = (values[i] - values[j]).norm();
            if d < best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

fn diameter(values: &[Complex64]) -> f64 {
    let mut widest: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            widest = widest.max((values[i] - values[j]).norm());
        }
    }
    widest
}

/// Smallest pairwise eigenvalue distance of the family at `parameter`.
pub(crate) fn min_distance<F: HamiltonianFamily + ?Sized>(family: &F, parameter: f64) -> Result<(f64, Vec<Complex64>)> {
    let values = eigenvalues(&family.at(parameter)?.assemble())?;
    Ok((closest_pair(&values).0, values))
}

fn detect_critical<F: HamiltonianFamily + ?Sized>(
    family: &F,
    grid: &[f64],
    paths: &[Vec<Complex64>],
) -> Result<Vec<CriticalPoint>> {
    let column = |s: usize| -> Vec<Complex64> { paths.iter().map(|p| p[s]).collect() };
    let closest: Vec<(f64, (usize, usize))> = (0..grid.len()).map(|s| closest_pair(&column(s))).collect();
    let spread = (0..grid.len())
        .map(|s| diameter(&column(s)))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut points = Vec::new();
    for s in 1..grid.len().saturating_sub(1) {
        let (d, states) = closest[s];
        if !(d <= closest[s - 1].0 && d < closest[s + 1].0) {
            continue;
        }
        let search = golden_section(
            |a| min_distance(family, a).map(|(d, _)| d),
            grid[s - 1],
            grid[s + 1],
            1e-14 * grid[s].abs().max(1.0),
            None,
        )?;
        let (distance, values) = min_distance(family, search.0)?;
        let (_, (p, q)) = closest_pair(&values);
        let gap = values[q] - values[p];
        let kind = if distance < COALESCENCE_RELATIVE * spread {
            CrossingKind::Coalescence
        } else if gap.re.abs() > gap.im.abs() {
            CrossingKind::Repulsion
        } else {
            CrossingKind::Attraction
        };
        points.push(CriticalPoint {
            parameter: search.0,
            kind,
            states,
            distance,
        });
    }
    Ok(points)
}

/// Golden-section minimization of `f` on `[lo, hi]` down to a bracket of `tolerance`.
///
/// With `unimodal_slack = Some(slack)` the search first scans the bracket
/// coarsely and then checks every four-point stencil, failing with
/// [`Error::NonUnimodal`] when an interior value exceeds both neighbours by
/// more than `slack`. Returns the bracket midpoint and its value.
pub(crate) fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tolerance: f64,
    unimodal_slack: Option<f64>,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let non_unimodal = Error::NonUnimodal { lo, hi };
    if let Some(slack) = unimodal_slack {
        const COARSE: usize = 16;
        let values = (0..=COARSE)
            .map(|i| f(lo + (hi - lo) * i as f64 / COARSE as f64))
            .collect::<Result<Vec<f64>>>()?;
        let lowest = (0..=COARSE)
            .min_by(|&x, &y| values[x].total_cmp(&values[y]))
            .unwrap_or(0);
        let descending = values[..=lowest].windows(2).all(|w| w[1] <= w[0] + slack);
        let ascending = values[lowest..].windows(2).all(|w| w[1] + slack >= w[0]);
        if !(descending && ascending) {
            return Err(non_unimodal);
        }
    }

    let (mut fa, mut fb) = (f(a)?, f(b)?);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..400 {
        if b - a <= tolerance {
            break;
        }
        if let Some(slack) = unimodal_slack {
            let peak1 = f1 > fa.max(f2) + slack;
            let peak2 = f2 > f1.max(fb) + slack;
            if peak1 || peak2 {
                return Err(non_unimodal);
            }
        }
        if f1 <= f2 {
            b = x2;
            fb = f2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            fa = f1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    let middle = 0.5 * (a + b);
    Ok((middle, f(middle)?))
}
