//! Small dense square-matrix kernels shared by the algebra and the
//! division algorithm. Row-major storage, no bounds beyond `debug_assert`.

use crate::error::{ConeError, Result};

#[inline]
pub(crate) fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub(crate) fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

/// Averages `a` with its transpose in place.
pub(crate) fn symmetrize(n: usize, a: &mut [f64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = m;
            a[j * n + i] = m;
        }
    }
}

/// Lower Cholesky factor of a symmetric matrix, `a = l lᵀ`.
pub(crate) fn cholesky(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(ConeError::NonPositivePivot { row: j, value: d });
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `l X = b` for lower triangular `l` (forward substitution).
pub(crate) fn solve_lower(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for col in 0..n {
        for i in 0..n {
            let mut s = x[i * n + col];
            for k in 0..i {
                s -= l[i * n + k] * x[k * n + col];
            }
            x[i * n + col] = s / l[i * n + i];
        }
    }
    x
}

/// Solves `lᵀ X = b` for lower triangular `l` (back substitution on the
/// implicit upper factor).
pub(crate) fn solve_lower_transposed(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for col in 0..n {
        for i in (0..n).rev() {
            let mut s = x[i * n + col];
            for k in (i + 1)..n {
                s -= l[k * n + i] * x[k * n + col];
            }
            x[i * n + col] = s / l[i * n + i];
        }
    }
    x
}
