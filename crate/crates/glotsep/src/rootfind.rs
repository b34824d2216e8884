//! Polynomial root finding via balanced companion-matrix eigenvalues, plus
//! the root-ordering and re-expansion helpers the decomposition relies on.
//!
//! Frame polynomials here reach degree ~500 (two pitch periods of 60 Hz
//! speech at 16 kHz) with roots clustered near the unit circle. The
//! companion-matrix route with Parlett–Reinsch balancing handles that range
//! robustly; re-expanding a factored polynomial is numerically delicate at
//! these degrees and only stays accurate when the factors are multiplied in
//! Leja order (each new root as far as possible, in a log-distance sense,
//! from the ones already used).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of the real polynomial `coeffs[0]·z^d + … + coeffs[d]`.
///
/// `coeffs[0]` must be nonzero; trailing zero coefficients simply produce
/// roots at the origin. Degree 0 yields an empty list.
pub(crate) fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    if coeffs.is_empty() || coeffs[0] == 0.0 {
        return Err(Error::param(
            "coeffs",
            "leading coefficient must be nonzero",
        ));
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[deg - i] / lead;
    }
    balance(&mut m);
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 50 * deg + 1024)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "companion eigensolver did not converge for degree {deg}"
            ))
        })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Parlett–Reinsch balancing with powers-of-two scale factors (exact in
/// floating point), bringing row and column norms to the same order of
/// magnitude before the eigensolve.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Reorders roots for numerically stable re-expansion: start from the
/// largest modulus, then greedily pick the root maximizing the sum of
/// log-distances to all roots already chosen.
pub(crate) fn leja_order(roots: &[Complex64]) -> Vec<Complex64> {
    let n = roots.len();
    if n <= 2 {
        return roots.to_vec();
    }
    let mut remaining: Vec<Complex64> = roots.to_vec();
    let mut ordered = Vec::with_capacity(n);
    let first = remaining
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    ordered.push(remaining.swap_remove(first));
    // Running sum of log|r − chosen| per remaining candidate.
    let mut score: Vec<f64> = remaining
        .iter()
        .map(|r| (r - ordered[0]).norm().max(f64::MIN_POSITIVE).ln())
        .collect();
    while !remaining.is_empty() {
        let best = score
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let chosen = remaining.swap_remove(best);
        score.swap_remove(best);
        for (r, s) in remaining.iter().zip(score.iter_mut()) {
            *s += (r - chosen).norm().max(f64::MIN_POSITIVE).ln();
        }
        ordered.push(chosen);
    }
    ordered
}

/// Expands `∏ (z − r_k)` into monic coefficients (descending powers) in the
/// given root order. Callers wanting accuracy at high degree pass the roots
/// through [`leja_order`] first.
pub(crate) fn expand_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        coeffs.push(Complex64::new(0.0, 0.0));
        for i in (1..coeffs.len()).rev() {
            let prev = coeffs[i - 1];
            coeffs[i] -= r * prev;
        }
    }
    coeffs
}
