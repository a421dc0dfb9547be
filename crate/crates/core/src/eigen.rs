//! Dense complex eigendecomposition via Schur form and triangular back-substitution.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SCHUR_MAX_ITERATIONS: usize = 10_000;
/// Relative tolerance under which two real parts count as tied.
const SORT_TIE_RELATIVE: f64 = 1e-12;

/// Eigenvalues sorted by ascending real part with unit 2-norm eigenvectors.
#[derive(Debug, Clone)]
pub(crate) struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: Vec<DVector<Complex64>>,
}

fn schur(m: &DMatrix<Complex64>) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let decomposition = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITERATIONS).ok_or(Error::EigenFailure)?;
    Ok(decomposition.unpack())
}

/// Sorted eigenvalues only.
pub(crate) fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    let values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    Ok(sort_order(&values).into_iter().map(|i| values[i]).collect())
}

pub(crate) fn eigen_decompose(m: &DMatrix<Complex64>) -> Result<Eigen> {
    let (q, t) = schur(m)?;
    let n = t.nrows();
    let t_norm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE);

    let raw_values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    let mut raw_vectors = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::from_element(n, Complex64::new(0.0, 0.0));
        y[k] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut sum = Complex64::new(0.0, 0.0);
            for m in j + 1..=k {
                sum += t[(j, m)] * y[m];
            }
            let mut denominator = t[(j, j)] - lambda;
            if denominator.norm() < small {
                denominator = Complex64::new(small, 0.0);
            }
            y[j] = -sum / denominator;
            let largest = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if largest > 1e150 {
                y /= Complex64::new(largest, 0.0);
            }
        }
        let x = &q * y;
        let norm = x.norm();
        raw_vectors.push(x / Complex64::new(norm, 0.0));
    }

    let order = sort_order(&raw_values);
    Ok(Eigen {
        values: order.iter().map(|&i| raw_values[i]).collect(),
        vectors: order.iter().map(|&i| raw_vectors[i].clone()).collect(),
    })
}

/// Indices ordering `values` by ascending real part, near-ties by ascending imaginary part.
///
/// Insertion sort, because the tie tolerance makes the order non-transitive.
pub(crate) fn sort_order(values: &[Complex64]) -> Vec<usize> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tie = SORT_TIE_RELATIVE * scale;
    let before = |a: Complex64, b: Complex64| {
        if (a.re - b.re).abs() > tie {
            a.re < b.re
        } else {
            a.im < b.im
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && before(values[order[j]], values[order[j - 1]]) {
            order.swap(j, j - 1);
            j -= 1;
        }
    }
    order
}
