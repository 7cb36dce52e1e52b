//! Smallest-eigenvalue kernel for small symmetric matrices.

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Smallest eigenvalue of a symmetric `n x n` matrix given in row-major order.
///
/// The input is symmetrized before use and must be symmetric to within
/// `1e-12` relative. Sizes 1 and 2 use closed forms; larger matrices run
/// cyclic Jacobi sweeps until the off-diagonal mass falls below `1e-12`
/// relative to the Frobenius norm.
pub fn min_eig_symmetric(matrix: &[f64], n: usize) -> Result<f64> {
    if n == 0 || matrix.len() != n * n {
        return Err(Error::InvalidParameter(format!(
            "matrix storage of {} entries is not a non-empty {n} x {n} square",
            matrix.len()
        )));
    }
    let scale = matrix.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for r in 0..n {
        for c in (r + 1)..n {
            let skew = (matrix[r * n + c] - matrix[c * n + r]).abs();
            if skew > REL_TOL * scale.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "matrix is not symmetric: |A[{r}][{c}] - A[{c}][{r}]| = {skew:e}"
                )));
            }
        }
    }
    match n {
        1 => Ok(matrix[0]),
        2 => {
            let a = matrix[0];
            let b = 0.5 * (matrix[1] + matrix[2]);
            let c = matrix[3];
            Ok(min_eig_2x2(a, b, c))
        }
        _ => {
            let mut work = vec![0.0; n * n];
            for r in 0..n {
                work[r * n + r] = matrix[r * n + r];
                for c in (r + 1)..n {
                    let v = 0.5 * (matrix[r * n + c] + matrix[c * n + r]);
                    work[r * n + c] = v;
                    work[c * n + r] = v;
                }
            }
            Ok(jacobi_min_eig(&mut work, n))
        }
    }
}

/// Smallest root of `[[a, b], [b, c]]`.
#[inline]
pub(crate) fn min_eig_2x2(a: f64, b: f64, c: f64) -> f64 {
    let d = a - c;
    0.5 * ((a + c) - (d * d + 4.0 * b * b).sqrt())
}

/// Cyclic Jacobi iteration; `work` is destroyed.
pub(crate) fn jacobi_min_eig(work: &mut [f64], n: usize) -> f64 {
    let fro: f64 = work.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = (REL_TOL * fro).max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for r in 0..n {
                for c in (r + 1)..n {
                    s += 2.0 * work[r * n + c] * work[r * n + c];
                }
            }
            s.sqrt()
        };
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = work[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = work[p * n + p];
                let aqq = work[q * n + q];
                // Classical stable rotation angle.
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                for r in 0..n {
                    let arp = work[r * n + p];
                    let arq = work[r * n + q];
                    work[r * n + p] = cos * arp - sin * arq;
                    work[r * n + q] = sin * arp + cos * arq;
                }
                for c in 0..n {
                    let apc = work[p * n + c];
                    let aqc = work[q * n + c];
                    work[p * n + c] = cos * apc - sin * aqc;
                    work[q * n + c] = sin * apc + cos * aqc;
                }
            }
        }
    }
    (0..n)
        .map(|r| work[r * n + r])
        .fold(f64::INFINITY, f64::min)
}
