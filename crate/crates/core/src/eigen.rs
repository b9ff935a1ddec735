//! Eigenvalues of small dense Hermitian matrices by cyclic Jacobi rotation.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::C64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the Hermitian matrix `h` (row-major, `dim × dim`),
/// ascending. Only the Hermitian part of `h` is used.
///
/// `H = A + iB` is embedded as the real symmetric `[[A, −B], [B, A]]`,
/// whose spectrum is that of `H` with every eigenvalue doubled.
pub(crate) fn hermitian_eigenvalues(h: &[C64], dim: usize) -> Vec<f64> {
    assert_eq!(h.len(), dim * dim);
    let m = 2 * dim;
    let mut a = vec![0.0; m * m];
    for r in 0..dim {
        for c in 0..dim {
            let z = (h[r * dim + c] + h[c * dim + r].conj()) * 0.5;
            a[r * m + c] = z.re;
            a[(r + dim) * m + c + dim] = z.re;
            a[r * m + c + dim] = -z.im;
            a[(r + dim) * m + c] = z.im;
        }
    }
    jacobi_symmetric(&mut a, m);
    let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    diag.into_iter().step_by(2).collect()
}

fn jacobi_symmetric(a: &mut [f64], n: usize) {
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut scale = 0.0;
        for r in 0..n {
            for c in 0..n {
                let x = a[r * n + c] * a[r * n + c];
                if r == c {
                    scale += x;
                } else {
                    off += x;
                }
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
            return;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + Float::sqrt(theta * theta + 1.0));
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}
