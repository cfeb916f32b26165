//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues, inverse iteration for the vectors.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = diag[0] - x;
    for i in 0.. {
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
        if i + 1 == diag.len() {
            break;
        }
        q = diag[i + 1] - x - off[i] * off[i] / q;
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (zero based), bisected to machine precision.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let span = hi - lo;
    lo -= 1e-12 * span.abs() + f64::MIN_POSITIVE;
    hi += 1e-12 * span.abs() + f64::MIN_POSITIVE;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − shift) x = rhs` by Gaussian elimination with partial pivoting.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let eps = f64::EPSILON * (1.0 + shift.abs());
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = eps;
            }
            let f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = eps;
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

fn normalise(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// The `k` lowest eigenpairs, ascending, with unit-norm eigenvectors.
pub fn lowest_eigenpairs(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    if off.len() + 1 != n {
        return Err(Error::EigenSolver("off-diagonal length must be n - 1".into()));
    }
    if k > n {
        return Err(Error::EigenSolver(format!("requested {k} eigenpairs from a {n}x{n} matrix")));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("matrix has non-finite entries".into()));
    }
    let (glo, ghi) = gershgorin(diag, off);
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
    for j in 0..k {
        let lam = kth_eigenvalue(diag, off, j);
        let shift = lam + 4.0 * f64::EPSILON * scale;
        // deterministic, non-degenerate start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
            .collect();
        normalise(&mut v);
        let mut converged = false;
        for _ in 0..8 {
            let prev = v.clone();
            shifted_solve(diag, off, shift, &mut v);
            for (_, u) in &pairs {
                let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= dot * b);
            }
            if normalise(&mut v) == 0.0 || v.iter().any(|x| !x.is_finite()) {
                return Err(Error::EigenSolver(format!("inverse iteration broke down for level {j}")));
            }
            let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
            if (1.0 - dot.abs()) < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            // accept if the Rayleigh residual is already at rounding level
            let r = residual_norm(diag, off, lam, &v);
            if r > 1e-8 * scale {
                return Err(Error::EigenSolver(format!(
                    "inverse iteration for level {j} stalled (residual {r:e})"
                )));
            }
        }
        // fix the sign so the first significant component is positive
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        pairs.push((lam, v));
    }
    Ok(pairs)
}

fn residual_norm(diag: &[f64], off: &[f64], lam: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut r2 = 0.0;
    for i in 0..n {
        let mut y = (diag[i] - lam) * v[i];
        if i > 0 {
            y += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            y += off[i] * v[i + 1];
        }
        r2 += y * y;
    }
    r2.sqrt()
}

/// Zeros of the physicists' Hermite polynomial `H_n`, ascending (Golub–Welsch).
pub fn hermite_zeros(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    (0..n).map(|k| kth_eigenvalue(&diag, &off, k)).collect()
}
