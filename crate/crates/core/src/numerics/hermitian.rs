//! Hermitian eigendecomposition (cyclic Jacobi), matrix powers and
//! singular values.

use super::{Complex64, Matrix, DEFAULT_TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order together with a unitary matrix
/// whose columns are the matching eigenvectors. The input is accepted when
/// `max |M - M^H| <= tol` and symmetrized before iterating, so the returned
/// eigenvalues are exactly real. Convergence is declared when the
/// off-diagonal Frobenius mass drops below `1e-14 * ||M||_F`.
pub fn eig_hermitian(m: &Matrix, tol: f64) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eig_hermitian needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol,
        });
    }
    let n = m.rows();

    // Symmetrize so rounding in the caller cannot leak into the iteration.
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        a.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let v = (m.get(i, j) + m.get(j, i).conj()).scale(0.5);
            a.set(i, j, v);
            a.set(j, i, v.conj());
        }
    }

    let mut v = Matrix::identity(n);
    let fro = a.frobenius();
    if fro == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let target = 1e-14 * fro;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if a.off_diagonal_mass() <= target {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let u = apq / g;
                let tau = (beta - alpha) / (2.0 * g);
                // Smaller-magnitude root of t^2 - 2*tau*t - 1 = 0.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- W^H A W with W = [[c, -s*u], [s*conj(u), c]] in the
                // (p, q) plane; V accumulates the right factors.
                let su = Complex64::new(s, 0.0) * u;
                let suc = su.conj();
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip.scale(c) + aiq * suc);
                    a.set(i, q, aiq.scale(c) - aip * su);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj.scale(c) + aqj * su);
                    a.set(q, j, aqj.scale(c) - apj * suc);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip.scale(c) + viq * suc);
                    v.set(i, q, viq.scale(c) - vip * su);
                }
                // The pivot is now zero up to rounding; pin it for the
                // off-mass bookkeeping.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
            }
        }
    }
    if !converged && a.off_diagonal_mass() > target {
        return Err(Error::NoConvergence {
            algorithm: "Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut sorted_v = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        sorted_v.set_column(dst, &col);
    }
    Ok((eigenvalues, sorted_v))
}

/// Matrix powers available for Hermitian positive definite inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixPower {
    /// M^{-1}
    Inverse,
    /// M^{-1/2}
    InverseSqrt,
    /// M^{1/2}
    Sqrt,
}

impl MatrixPower {
    fn apply(self, lambda: f64) -> f64 {
        match self {
            MatrixPower::Inverse => 1.0 / lambda,
            MatrixPower::InverseSqrt => 1.0 / lambda.sqrt(),
            MatrixPower::Sqrt => lambda.sqrt(),
        }
    }
}

/// Computes M^e for a Hermitian positive definite M via its
/// eigendecomposition. Fails with `NotPositiveDefinite` when the smallest
/// eigenvalue is at or below `1e-12` times the largest.
pub fn hermitian_power(m: &Matrix, exponent: MatrixPower) -> Result<Matrix> {
    let tol = DEFAULT_TOL * (1.0 + m.max_abs());
    let (eigenvalues, v) = eig_hermitian(m, tol)?;
    let n = m.rows();
    let min = eigenvalues[0];
    let max = eigenvalues[n - 1];
    if !min.is_finite() || min <= 1e-12 * max || max <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    // V diag(lambda^e) V^H
    let mut out = Matrix::zeros(n, n);
    for (k, &eig) in eigenvalues.iter().enumerate() {
        let w = exponent.apply(eig);
        for i in 0..n {
            let vik = v.get(i, k).scale(w);
            for j in 0..n {
                let add = vik * v.get(j, k).conj();
                out.set(i, j, out.get(i, j) + add);
            }
        }
    }
    Ok(out)
}

/// Singular values in descending order, computed from the eigenvalues of
/// the smaller of M^H M and M M^H. Negative rounding is clamped to zero.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let gram = if m.cols() <= m.rows() {
        m.adjoint().mul(m)
    } else {
        m.mul(&m.adjoint())
    };
    // The Gram product is Hermitian up to rounding of order eps * ||M||^2.
    let tol = 1e-12 * (1.0 + gram.max_abs());
    let (eigenvalues, _) = eig_hermitian(&gram, tol)?;
    let mut sv: Vec<f64> = eigenvalues
        .iter()
        .rev()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    // Ascending eigenvalues reversed are already descending; keep exact order.
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(sv)
}
