//! Dense small-matrix linear algebra over complex scalars.
//!
//! Everything in the toolkit runs at desk scale (dimensions well below 64),
//! so the solvers favour robustness and determinism over asymptotics:
//! cyclic Jacobi for Hermitian eigenproblems, Hessenberg + shifted QR for
//! general eigenvalues, and Gram-matrix eigendecompositions for singular
//! values. All routines are pure functions on immutable inputs.

mod general;
mod hermitian;

pub use general::{det, eig_general, spectral_radius};
pub use hermitian::{eig_hermitian, hermitian_power, singular_values, MatrixPower};

use crate::error::{Error, Result};
pub use num_complex::Complex64;

/// Default numeric tolerance used across the crate for residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative eigenvalue threshold for rank decisions.
pub const RANK_EIG_TOL: f64 = 1e-10;

/// A vector in an n-dimensional complex inner-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    entries: Vec<Complex64>,
}

impl Vector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("vector dimension must be >= 1".into()));
        }
        if let Some(bad) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Validation(format!(
                "vector entry {bad} is not finite"
            )));
        }
        Ok(Vector { entries })
    }

    /// Builds a real vector; intended for literal data.
    pub fn real(entries: &[f64]) -> Self {
        Vector::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .expect("finite nonempty real entries")
    }

    pub fn zero(dim: usize) -> Self {
        Vector {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    /// Inner product, linear in `self` and conjugate-linear in `other`.
    pub fn inner(&self, other: &Vector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, k: Complex64) -> Vector {
        Vector {
            entries: self.entries.iter().map(|z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self + t * other
    pub fn add_scaled(&self, t: Complex64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + t * b)
                .collect(),
        }
    }

    pub fn conj(&self) -> Vector {
        Vector {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Validation("matrix must be nonempty".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Validation(format!("row {i} has a non-finite entry")));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a real matrix; intended for literal data.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Matrix::from_rows(&rows).expect("finite rectangular real data")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector {
            entries: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    pub fn set_column(&mut self, j: usize, v: &Vector) {
        debug_assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch");
        let mut out = Vector::zero(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out.entries[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Matrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= k;
        }
        out
    }

    /// Rank-one product u v^H.
    pub fn outer(u: &Vector, v: &Vector) -> Matrix {
        let mut out = Matrix::zeros(u.dim(), v.dim());
        for i in 0..u.dim() {
            for j in 0..v.dim() {
                out.set(i, j, u.get(i) * v.get(j).conj());
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max_{ij} |a_ij - conj(a_ji)|; zero for an exactly Hermitian matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Frobenius norm of the off-diagonal part.
    pub(crate) fn off_diagonal_mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}
