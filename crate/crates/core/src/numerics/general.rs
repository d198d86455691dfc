//! General (non-Hermitian) eigenvalues via Hessenberg reduction and
//! shifted complex QR, plus an LU determinant used as a test oracle.

use super::{Complex64, Matrix};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues of a square complex matrix (side <= 64) as the multiset of
/// roots of det(M - zI). Single-shift QR with Wilkinson shifts on the
/// Hessenberg form; 30n iterations are allowed per eigenvalue.
pub fn eig_general(m: &Matrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eig_general needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n > 64 {
        return Err(Error::Validation(format!(
            "eig_general supports side <= 64, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    let h = hessenberg(m.clone());
    qr_eigenvalues(h)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &Matrix) -> Result<f64> {
    Ok(eig_general(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn hessenberg(mut a: Matrix) -> Matrix {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for the column below the subdiagonal.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a.get(i, k)).collect();
        let sigma = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if sigma == 0.0 {
            continue;
        }
        let phase = if v[0] == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase.scale(sigma);
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // Left: rows k+1..n, columns k..n.
        for j in k..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * a.get(k + 1 + t, j);
            }
            let dot = dot.scale(beta);
            for (t, vi) in v.iter().enumerate() {
                let val = a.get(k + 1 + t, j) - vi * dot;
                a.set(k + 1 + t, j, val);
            }
        }
        // Right: all rows, columns k+1..n.
        for i in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += a.get(i, k + 1 + t) * vi;
            }
            let dot = dot.scale(beta);
            for (t, vi) in v.iter().enumerate() {
                let val = a.get(i, k + 1 + t) - dot * vi.conj();
                a.set(i, k + 1 + t, val);
            }
        }
    }
    a
}

fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d).scale(0.5);
    let half_diff = (a - d).scale(0.5);
    let disc = (half_diff * half_diff + b * c).sqrt();
    (half_tr + disc, half_tr - disc)
}

fn qr_eigenvalues(mut h: Matrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut hi = n - 1;
    let eps = f64::EPSILON;
    let cap_per_eigenvalue = 30 * n;
    let mut iters = 0usize;

    loop {
        // Flush negligible subdiagonal entries.
        for k in 1..=hi {
            let bound = eps * (h.get(k - 1, k - 1).norm() + h.get(k, k).norm());
            if h.get(k, k - 1).norm() <= bound {
                h.set(k, k - 1, ZERO);
            }
        }
        if hi == 0 {
            eigenvalues.push(h.get(0, 0));
            break;
        }
        if h.get(hi, hi - 1) == ZERO {
            eigenvalues.push(h.get(hi, hi));
            hi -= 1;
            iters = 0;
            continue;
        }
        if hi == 1 || h.get(hi - 1, hi - 2) == ZERO {
            let (l1, l2) = eig_2x2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            eigenvalues.push(l1);
            eigenvalues.push(l2);
            if hi == 1 {
                break;
            }
            hi -= 2;
            iters = 0;
            continue;
        }

        iters += 1;
        if iters > cap_per_eigenvalue {
            return Err(Error::NoConvergence {
                algorithm: "shifted QR eigensolver",
                iterations: cap_per_eigenvalue,
            });
        }

        // Start of the unreduced block ending at hi.
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1) != ZERO {
            lo -= 1;
        }

        let shift = if iters.is_multiple_of(10) {
            // Exceptional shift to break symmetric stalls.
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            let (l1, l2) = eig_2x2(
                h.get(hi - 1, hi - 1),
                h.get(hi - 1, hi),
                h.get(hi, hi - 1),
                h.get(hi, hi),
            );
            let d = h.get(hi, hi);
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // Explicit QR sweep on the active block: H - sI = QR, H <- RQ + sI.
        for i in lo..=hi {
            let v = h.get(i, i) - shift;
            h.set(i, i, v);
        }
        let mut rotations: Vec<(Complex64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = h.get(k, k);
            let y = h.get(k + 1, k);
            let d = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (g11, g12) = if d == 0.0 {
                (Complex64::new(1.0, 0.0), ZERO)
            } else {
                (x.conj().unscale(d), y.conj().unscale(d))
            };
            // G = [[g11, g12], [-conj(g12), conj(g11)]] maps (x, y) to (d, 0).
            for j in k..=hi {
                let top = h.get(k, j);
                let bot = h.get(k + 1, j);
                h.set(k, j, g11 * top + g12 * bot);
                h.set(k + 1, j, g11.conj() * bot - g12.conj() * top);
            }
            rotations.push((g11, g12));
        }
        for (k, (g11, g12)) in rotations.iter().enumerate() {
            let k = lo + k;
            for i in lo..=(k + 1).min(hi) {
                let left = h.get(i, k);
                let right = h.get(i, k + 1);
                h.set(i, k, left * g11.conj() + right * g12.conj());
                h.set(i, k + 1, right * g11 - left * g12);
            }
        }
        for i in lo..=hi {
            let v = h.get(i, i) + shift;
            h.set(i, i, v);
        }
    }
    Ok(eigenvalues)
}

/// Determinant by LU factorization with partial pivoting.
pub fn det(m: &Matrix) -> Complex64 {
    assert!(m.is_square(), "determinant needs a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut sign = 1.0;
    let mut result = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot = k;
        let mut best = a.get(k, k).norm();
        for i in (k + 1)..n {
            let mag = a.get(i, k).norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        if best == 0.0 {
            return ZERO;
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a.get(k, j);
                a.set(k, j, a.get(pivot, j));
                a.set(pivot, j, tmp);
            }
            sign = -sign;
        }
        let akk = a.get(k, k);
        result *= akk;
        for i in (k + 1)..n {
            let factor = a.get(i, k) / akk;
            for j in (k + 1)..n {
                let val = a.get(i, j) - factor * a.get(k, j);
                a.set(i, j, val);
            }
        }
    }
    result.scale(sign)
}
