//! Small dense symmetric eigensolvers.
//!
//! Two classics, both allocation-light and dependency-free: cyclic Jacobi
//! for full dense symmetric matrices (used for graphs small enough to
//! densify) and QL with implicit shifts (`tqli`) for symmetric tridiagonal
//! matrices (used on the Lanczos projection of larger graphs). Matrices are
//! row-major `Vec<f64>`.

use crate::{Error, Result};

pub(crate) fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Sort eigenpairs ascending by value, permuting the columns of `vecs`
/// (`rows x vals.len()`, row-major) to match.
pub(crate) fn sort_eigen_ascending(vals: &mut [f64], vecs: &mut [f64], rows: usize) {
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let old_vals = vals.to_vec();
    let old_vecs = vecs.to_vec();
    for (new_j, &old_j) in order.iter().enumerate() {
        vals[new_j] = old_vals[old_j];
        for k in 0..rows {
            vecs[k * n + new_j] = old_vecs[k * n + old_j];
        }
    }
}

/// Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations. Returns `(values, vectors)` with values ascending and the
/// eigenvector for `values[j]` in column `j` of the row-major `vectors`.
pub(crate) fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(a.len(), n * n);
    let mut v = identity(n);
    if n == 1 {
        return Ok((a, v));
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut converged = false;
    let mut last_off = f64::INFINITY;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        last_off = off;
        if off <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
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
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNotConverged {
            residual: last_off / scale,
            iters: 100,
            tol: 1e-14,
        });
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    sort_eigen_ascending(&mut vals, &mut v, n);
    Ok((vals, v))
}

/// Eigendecomposition of a symmetric tridiagonal matrix by QL with implicit
/// shifts. `d` holds the diagonal and is replaced by the (unsorted)
/// eigenvalues; `e[i]` couples rows `i` and `i+1` (`e[n-1]` is ignored) and
/// is destroyed; `z` (row-major `n x n`, identity on entry) accumulates the
/// rotations so its column `j` ends up as the eigenvector for `d[j]`.
pub(crate) fn tqli(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    assert_eq!(e.len(), n);
    assert_eq!(z.len(), n * n);
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::EigenNotConverged {
                    residual: e[l].abs(),
                    iters: iter,
                    tol: f64::EPSILON,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflation: split the problem here and restart.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
