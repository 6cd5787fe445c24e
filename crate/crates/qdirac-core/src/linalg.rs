//! Small dense linear-algebra helpers shared by the operator modules.

use ndarray::Array2;

use crate::C64;

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrised as `(A + A†)/2` before the solve, so callers
/// may pass matrices that are Hermitian only up to truncation noise.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigensolve needs a square matrix");
    if n == 0 {
        return Vec::new();
    }
    let mut h = nalgebra::DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)].conj());
        }
    }
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Spectral norm estimate via power iteration on `A†A`.
///
/// Deterministic: starts from a fixed vector and runs until the Rayleigh
/// quotient stabilises or `max_iter` is reached.  The result is a lower
/// bound that is tight for our purposes (norm sweeps and boundedness
/// classification).
pub fn spectral_norm(a: &Array2<C64>) -> f64 {
    let (rows, cols) = (a.nrows(), a.ncols());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut v: Vec<C64> = (0..cols)
        .map(|i| C64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
        .collect();
    let mut norm_est = 0.0f64;
    for _ in 0..200 {
        // w = A v
        let mut w = vec![C64::new(0.0, 0.0); rows];
        for i in 0..rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..cols {
                acc += a[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        // v' = A† w
        let mut v2 = vec![C64::new(0.0, 0.0); cols];
        for j in 0..cols {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..rows {
                acc += a[(i, j)].conj() * w[i];
            }
            v2[j] = acc;
        }
        let n2: f64 = v2.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n2 == 0.0 {
            return 0.0;
        }
        let new_est = {
            let vn: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            (n2 / vn).sqrt()
        };
        for x in v2.iter_mut() {
            *x /= n2;
        }
        v = v2;
        if (new_est - norm_est).abs() <= 1e-11 * new_est.max(1.0) {
            return new_est;
        }
        norm_est = new_est;
    }
    norm_est
}

/// Largest modulus over the `(rows, cols)` interior block, i.e. entries
/// with both indices below `dim − margin`.
pub fn interior_sup(a: &Array2<C64>, margin: usize) -> f64 {
    let r = a.nrows().saturating_sub(margin);
    let c = a.ncols().saturating_sub(margin);
    let mut sup = 0.0f64;
    for i in 0..r {
        for j in 0..c {
            sup = sup.max(a[(i, j)].norm());
        }
    }
    sup
}
