//! Cyclic Jacobi eigensolver for dense real symmetric matrices.
//!
//! A sequence of plane rotations annihilates one off-diagonal entry at a
//! time; the off-diagonal mass shrinks quadratically once sweeps settle.
//! For the matrix sizes in this crate (a few hundred at most) the O(n^3)
//! cost is irrelevant and the accuracy is near machine precision.

use super::LinalgError;

const MAX_SWEEPS: usize = 60;

/// Returns the eigenvalues (unsorted) of the symmetric matrix `a` (row-major
/// `n x n`), and the eigenvector matrix (columns are eigenvectors, matching
/// the eigenvalue order) when `want_vectors` is set.
pub fn jacobi_eigen(
    mut a: Vec<f64>,
    n: usize,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>), LinalgError> {
    debug_assert_eq!(a.len(), n * n);
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };

    if n == 1 {
        return Ok((vec![a[0]], v));
    }

    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            return Ok((d, v));
        }

        // During the first sweeps, skip rotations on entries that are tiny
        // relative to the whole matrix (the standard threshold strategy).
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // After a few sweeps, an off-diagonal entry that no longer
                // affects its diagonal neighbors in double precision is set
                // to zero outright.
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }

                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;

                let rotate = |m: &mut [f64], i1: usize, j1: usize, i2: usize, j2: usize| {
                    let g = m[i1 * n + j1];
                    let h = m[i2 * n + j2];
                    m[i1 * n + j1] = g - s * (h + g * tau);
                    m[i2 * n + j2] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j, p, j, q);
                }
                for j in p + 1..q {
                    rotate(&mut a, p, j, j, q);
                }
                for j in q + 1..n {
                    rotate(&mut a, p, j, q, j);
                }
                if let Some(vm) = v.as_mut() {
                    for j in 0..n {
                        rotate(vm, j, p, j, q);
                    }
                }
            }
        }

        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }

    Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS })
}
