//! Frames, frame operators, canonical duals, the affine parameterization of
//! the dual space, and the prescribed-inner-product solver.
//!
//! A frame is an ordered spanning sequence of N vectors in an n-dimensional
//! complex inner-product space. The synthesis matrix (n x N, i-th column
//! f_i) is carried alongside the vectors; the analysis matrix is its
//! adjoint. Duality of (F, G) is the identity sum_i g_i f_i^H = I, which is
//! equivalent to both reconstruction formulas.

use crate::error::{Error, Result};
use crate::numerics::{
    eig_hermitian, hermitian_power, Complex64, Matrix, MatrixPower, Vector, DEFAULT_TOL,
    RANK_EIG_TOL,
};

/// A finite spanning sequence of vectors together with its synthesis matrix.
///
/// Frames are immutable after construction; operations return new values.
/// Zero vectors are allowed as long as the sequence still spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Vec<Vector>,
    synthesis: Matrix,
}

/// Optimal frame bounds: the extreme eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    pub parseval: bool,
}

/// A frame together with one of its verified duals.
#[derive(Debug, Clone)]
pub struct DualPair {
    frame: Frame,
    dual: Frame,
}

/// The canonical dual plus an orthonormal basis of the homogeneous dual
/// space {U : sum_i u_i f_i^H = 0}, giving every dual of F as
/// canonical + sum_k c_k U^(k) for unique complex coefficients.
#[derive(Debug, Clone)]
pub struct DualParameterization {
    pub canonical: Frame,
    pub basis: Vec<Matrix>,
}

impl Frame {
    /// Validates dimensions, finiteness and the spanning property.
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Validation("frame needs at least one vector".into()));
        }
        let n = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != n) {
            return Err(Error::ShapeMismatch(
                "all frame vectors must share one dimension".into(),
            ));
        }
        if vectors.len() < n {
            return Err(Error::NotAFrame {
                min_eigenvalue: 0.0,
            });
        }
        let mut synthesis = Matrix::zeros(n, vectors.len());
        for (i, v) in vectors.iter().enumerate() {
            synthesis.set_column(i, v);
        }
        let frame = Frame { vectors, synthesis };
        let (eigs, _) = eig_hermitian(&frame.frame_operator(), DEFAULT_TOL)?;
        let (min, max) = (eigs[0], eigs[n - 1]);
        if !min.is_finite() || min <= RANK_EIG_TOL * max || max <= 0.0 {
            return Err(Error::NotAFrame {
                min_eigenvalue: min,
            });
        }
        Ok(frame)
    }

    pub fn from_synthesis(synthesis: &Matrix) -> Result<Self> {
        let vectors = (0..synthesis.cols()).map(|j| synthesis.column(j)).collect();
        Frame::new(vectors)
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.synthesis.rows()
    }

    /// Number of frame vectors N (always at least the dimension).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_basis(&self) -> bool {
        self.len() == self.dim()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &Vector {
        &self.vectors[i]
    }

    pub fn synthesis(&self) -> &Matrix {
        &self.synthesis
    }

    /// The analysis matrix (N x n, i-th row f_i^H).
    pub fn analysis(&self) -> Matrix {
        self.synthesis.adjoint()
    }

    /// S_F = sum_i f_i f_i^H, Hermitian positive definite for a frame.
    pub fn frame_operator(&self) -> Matrix {
        // Built entry-wise from the synthesis matrix so the result is
        // exactly Hermitian.
        let n = self.dim();
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.len() {
                    acc += self.synthesis.get(i, k) * self.synthesis.get(j, k).conj();
                }
                if i == j {
                    s.set(i, i, Complex64::new(acc.re, 0.0));
                } else {
                    s.set(i, j, acc);
                    s.set(j, i, acc.conj());
                }
            }
        }
        s
    }

    /// Optimal frame bounds from the extreme eigenvalues of S_F.
    pub fn frame_bounds(&self) -> Result<FrameBounds> {
        let s = self.frame_operator();
        let (eigs, _) = eig_hermitian(&s, DEFAULT_TOL * (1.0 + s.max_abs()))?;
        let (lower, upper) = (eigs[0], eigs[self.dim() - 1]);
        if lower <= 1e-12 * upper {
            return Err(Error::NotAFrame {
                min_eigenvalue: lower,
            });
        }
        let tight = upper - lower <= 1e-10 * upper;
        Ok(FrameBounds {
            lower,
            upper,
            tight,
            parseval: tight && (lower - 1.0).abs() <= 1e-10,
        })
    }

    /// The canonical dual {S_F^{-1} f_i}.
    pub fn canonical_dual(&self) -> Result<Frame> {
        let s_inv = hermitian_power(&self.frame_operator(), MatrixPower::Inverse)?;
        Frame::from_synthesis(&s_inv.mul(&self.synthesis))
    }

    /// Applies an arbitrary linear map to every frame vector, revalidating
    /// the spanning property.
    pub fn transform(&self, m: &Matrix) -> Result<Frame> {
        if m.cols() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "transform expects {} columns",
                self.dim()
            )));
        }
        Frame::from_synthesis(&m.mul(&self.synthesis))
    }

    /// Applies a unitary to every frame vector.
    pub fn apply_unitary(&self, u: &Matrix) -> Result<Frame> {
        if !u.is_square() || u.rows() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "unitary must be {0}x{0}",
                self.dim()
            )));
        }
        let dev = u
            .adjoint()
            .mul(u)
            .sub(&Matrix::identity(self.dim()))
            .max_abs();
        if dev > DEFAULT_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Frame::from_synthesis(&u.mul(&self.synthesis))
    }

    /// 2-norm distance between frames as vector sequences:
    /// sqrt(sum_i ||a_i - b_i||^2).
    pub fn distance(&self, other: &Frame) -> f64 {
        assert_eq!(self.len(), other.len());
        self.vectors
            .iter()
            .zip(other.vectors())
            .map(|(a, b)| a.sub(b).norm_sq())
            .sum::<f64>()
            .sqrt()
    }
}

/// max |sum_i g_i f_i^H - I|; zero exactly when (F, G) is a dual pair.
pub fn dual_residual(frame: &Frame, dual: &Frame) -> Result<f64> {
    if frame.dim() != dual.dim() || frame.len() != dual.len() {
        return Err(Error::ShapeMismatch(format!(
            "dual candidate is {}x{}, frame is {}x{}",
            dual.dim(),
            dual.len(),
            frame.dim(),
            frame.len()
        )));
    }
    let product = dual.synthesis().mul(&frame.analysis());
    Ok(product.sub(&Matrix::identity(frame.dim())).max_abs())
}

/// Whether G is a dual frame of F within `tol`.
pub fn is_dual_pair(frame: &Frame, dual: &Frame, tol: f64) -> Result<bool> {
    Ok(dual_residual(frame, dual)? <= tol)
}

impl DualPair {
    /// Verifies duality within 1e-9 before accepting the pair.
    pub fn new(frame: Frame, dual: Frame) -> Result<Self> {
        let residual = dual_residual(&frame, &dual)?;
        if residual > 1e-9 {
            return Err(Error::NotADualPair { residual });
        }
        Ok(DualPair { frame, dual })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn dual(&self) -> &Frame {
        &self.dual
    }
}

impl DualParameterization {
    /// Number of complex parameters, n * (N - n).
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// canonical + sum_k c_k U^(k).
    pub fn dual_from_coefficients(&self, coefficients: &[Complex64]) -> Result<Frame> {
        assert_eq!(coefficients.len(), self.basis.len());
        let mut synthesis = self.canonical.synthesis().clone();
        for (c, u) in coefficients.iter().zip(&self.basis) {
            synthesis = synthesis.add(&u.scale(*c));
        }
        Frame::from_synthesis(&synthesis)
    }

    /// Frobenius projection of a dual onto the parameter basis. For any
    /// verified dual of the underlying frame this recovers coordinates that
    /// reproduce it.
    pub fn coefficients_for(&self, dual: &Frame) -> Vec<Complex64> {
        let diff = dual.synthesis().sub(self.canonical.synthesis());
        self.basis
            .iter()
            .map(|u| {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..diff.rows() {
                    for j in 0..diff.cols() {
                        acc += u.get(i, j).conj() * diff.get(i, j);
                    }
                }
                acc
            })
            .collect()
    }
}

/// The full affine parameterization of the dual space of F.
///
/// The homogeneous part is built from an orthonormal basis {w_j} of the
/// null space of the synthesis matrix (obtained from the Gram-matrix
/// eigendecomposition, smallest eigenvalues first) tensored with the
/// standard basis: U^(r,j) = e_r conj(w_j)^T, ordered j-major. This fixes a
/// canonical, reproducible ordering; the basis is orthonormal under the
/// Frobenius inner product. For a basis frame (N = n) the parameter list is
/// empty.
pub fn dual_space_basis(frame: &Frame) -> Result<DualParameterization> {
    let n = frame.dim();
    let count = frame.len();
    let canonical = frame.canonical_dual()?;
    let null_dim = count - n;
    if null_dim == 0 {
        return Ok(DualParameterization {
            canonical,
            basis: Vec::new(),
        });
    }
    let gram = frame.analysis().mul(frame.synthesis());
    let (_, v) = eig_hermitian(&gram, 1e-12 * (1.0 + gram.max_abs()))?;
    let mut basis = Vec::with_capacity(n * null_dim);
    for j in 0..null_dim {
        let w = v.column(j);
        for r in 0..n {
            let mut u = Matrix::zeros(n, count);
            for i in 0..count {
                u.set(r, i, w.get(i).conj());
            }
            basis.push(u);
        }
    }
    debug_assert!(basis
        .iter()
        .all(|u| u.mul(&frame.analysis()).max_abs() <= 1e-10));
    Ok(DualParameterization { canonical, basis })
}

/// Numerical rank of a set of vectors, decided on the Gram-matrix
/// eigenvalues with the 1e-10 relative threshold.
pub fn rank_of(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = vectors.len();
    let mut gram = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram.set(i, j, vectors[i].inner(&vectors[j]));
        }
    }
    let (eigs, _) = eig_hermitian(&gram, 1e-12 * (1.0 + gram.max_abs()))
        .expect("Gram matrices are Hermitian by construction");
    let max = eigs[m - 1].max(0.0);
    if max == 0.0 {
        return 0;
    }
    eigs.iter().filter(|&&l| l > RANK_EIG_TOL * max).count()
}

/// True when span(a) and span(b) intersect only in {0}, tested as
/// rank(a ∪ b) = rank(a) + rank(b).
pub fn spans_intersect_trivially(a: &[Vector], b: &[Vector]) -> bool {
    let mut joined: Vec<Vector> = a.to_vec();
    joined.extend_from_slice(b);
    rank_of(&joined) == rank_of(a) + rank_of(b)
}

/// Minimum-norm h with <f_i, h> = alpha for every input vector
/// (pseudoinverse solution of the row system).
pub fn solve_inner_products(vectors: &[Vector], alpha: Complex64) -> Result<Vector> {
    if vectors.is_empty() {
        return Err(Error::Validation("need at least one vector".into()));
    }
    let m = vectors.len();
    let n = vectors[0].dim();
    if vectors.iter().any(|v| v.dim() != n) {
        return Err(Error::ShapeMismatch("mixed vector dimensions".into()));
    }
    let rank = rank_of(vectors);
    if rank < m {
        return Err(Error::DependentInput { rank, count: m });
    }
    let mut gram = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram.set(i, j, vectors[i].inner(&vectors[j]));
        }
    }
    let (eigs, v) = eig_hermitian(&gram, 1e-12 * (1.0 + gram.max_abs()))?;
    // z = Gram^{-1} (alpha * ones), via the eigendecomposition.
    let ones = Vector::new(vec![alpha; m])?;
    let mut z = Vector::zero(m);
    for (k, &eig) in eigs.iter().enumerate() {
        let col = v.column(k);
        let coeff = ones.inner(&col) / eig;
        z = z.add(&col.scale(coeff));
    }
    // h = conj(A^H z) with A the unconjugated row matrix of the inputs.
    let mut h = Vector::zero(n);
    for (i, f) in vectors.iter().enumerate() {
        h = h.add(&f.scale(z.get(i).conj()));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example4_frame() -> Frame {
        Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 0.5]),
            Vector::real(&[0.0, 0.5]),
        ])
        .unwrap()
    }

    fn example5_frame() -> Frame {
        Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[1.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn frame_operator_of_example5_frame() {
        let s = example5_frame().frame_operator();
        let expected = Matrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(s.sub(&expected).max_abs() < 1e-15);
    }

    #[test]
    fn frame_operator_matches_outer_product_sum() {
        let f = example5_frame();
        let mut direct = Matrix::zeros(2, 2);
        for v in f.vectors() {
            direct = direct.add(&Matrix::outer(v, v));
        }
        assert!(f.frame_operator().sub(&direct).max_abs() < 1e-12);
    }

    #[test]
    fn orthonormal_basis_is_parseval() {
        let f = Frame::new(vec![Vector::real(&[1.0, 0.0]), Vector::real(&[0.0, 1.0])]).unwrap();
        assert!(f.frame_operator().sub(&Matrix::identity(2)).max_abs() < 1e-15);
        let b = f.frame_bounds().unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert!(b.tight && b.parseval);
        // Parseval frames are their own canonical dual.
        let dual = f.canonical_dual().unwrap();
        assert!(f.distance(&dual) < 1e-10);
    }

    #[test]
    fn example4_bounds() {
        let b = example4_frame().frame_bounds().unwrap();
        assert!((b.lower - 0.5).abs() < 1e-12);
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!(!b.tight);
    }

    #[test]
    fn example5_bounds() {
        let b = example5_frame().frame_bounds().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!((b.upper - 3.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_duals_from_the_examples() {
        let dual4 = example4_frame().canonical_dual().unwrap();
        let expected4 = Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[0.0, 1.0]),
        ])
        .unwrap();
        assert!(dual4.distance(&expected4) < 1e-12);

        let dual5 = example5_frame().canonical_dual().unwrap();
        let expected5 = Frame::new(vec![
            Vector::real(&[2.0 / 3.0, -1.0 / 3.0]),
            Vector::real(&[-1.0 / 3.0, 2.0 / 3.0]),
            Vector::real(&[1.0 / 3.0, 1.0 / 3.0]),
        ])
        .unwrap();
        assert!(dual5.distance(&expected5) < 1e-12);
    }

    #[test]
    fn non_spanning_sequence_rejected() {
        let err = Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[2.0, 0.0]),
            Vector::real(&[3.0, 0.0]),
        ]);
        assert!(matches!(err, Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn dual_pair_checks() {
        let f = example5_frame();
        let canonical = f.canonical_dual().unwrap();
        assert!(is_dual_pair(&f, &canonical, 1e-9).unwrap());

        // The alpha = beta = -1/6 member of the dual family.
        let g = Frame::new(vec![
            Vector::real(&[0.5, -0.5]),
            Vector::real(&[-0.5, 0.5]),
            Vector::real(&[0.5, 0.5]),
        ])
        .unwrap();
        assert!(is_dual_pair(&f, &g, 1e-12).unwrap());

        // {e1, e2, 0} is the family member at alpha = beta = 1/3 and is a
        // genuine dual despite its zero vector.
        let zero_third = Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[0.0, 0.0]),
        ])
        .unwrap();
        assert!(is_dual_pair(&f, &zero_third, 1e-12).unwrap());

        let not_dual = Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[1.0, 0.0]),
        ])
        .unwrap();
        assert!(!is_dual_pair(&f, &not_dual, 1e-9).unwrap());
        assert!(DualPair::new(f, not_dual).is_err());
    }

    #[test]
    fn basis_frame_has_empty_parameterization() {
        let f = Frame::new(vec![Vector::real(&[2.0, 0.0]), Vector::real(&[1.0, 1.0])]).unwrap();
        let p = dual_space_basis(&f).unwrap();
        assert_eq!(p.dimension(), 0);
    }

    #[test]
    fn example4_dual_family_shape() {
        // Null direction (0, 1, -1)/sqrt(2): u_1 = 0 and u_3 = -u_2.
        let p = dual_space_basis(&example4_frame()).unwrap();
        assert_eq!(p.dimension(), 2);
        for u in &p.basis {
            assert!(u.column(0).norm() == 0.0);
            assert!(u.column(1).add(&u.column(2)).norm() < 1e-12);
        }
    }

    #[test]
    fn example5_dual_family_matches_paper() {
        // Duals are {(2/3+a, -1/3+b), (-1/3+a, 2/3+b), (1/3-a, 1/3-b)}.
        let f = example5_frame();
        let p = dual_space_basis(&f).unwrap();
        assert_eq!(p.dimension(), 2);
        let c = vec![Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0)];
        let g = p.dual_from_coefficients(&c).unwrap();
        assert!(is_dual_pair(&f, &g, 1e-9).unwrap());
        let g1 = g.vector(0);
        let g2 = g.vector(1);
        let g3 = g.vector(2);
        let alpha = g1.get(0) - Complex64::new(2.0 / 3.0, 0.0);
        let beta = g1.get(1) - Complex64::new(-1.0 / 3.0, 0.0);
        assert!((g2.get(0) - (Complex64::new(-1.0 / 3.0, 0.0) + alpha)).norm() < 1e-10);
        assert!((g2.get(1) - (Complex64::new(2.0 / 3.0, 0.0) + beta)).norm() < 1e-10);
        assert!((g3.get(0) - (Complex64::new(1.0 / 3.0, 0.0) - alpha)).norm() < 1e-10);
        assert!((g3.get(1) - (Complex64::new(1.0 / 3.0, 0.0) - beta)).norm() < 1e-10);
    }

    #[test]
    fn parameterization_round_trip() {
        let f = example5_frame();
        let p = dual_space_basis(&f).unwrap();
        let c = vec![Complex64::new(0.17, -0.4), Complex64::new(-1.3, 0.02)];
        let g = p.dual_from_coefficients(&c).unwrap();
        let back = p.coefficients_for(&g);
        for (x, y) in c.iter().zip(&back) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn unitary_image_of_example4_frame() {
        let rot = Matrix::from_real(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let g = example4_frame().apply_unitary(&rot).unwrap();
        let expected = Frame::new(vec![
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[-0.5, 0.0]),
            Vector::real(&[-0.5, 0.0]),
        ])
        .unwrap();
        assert!(g.distance(&expected) < 1e-15);
        // Frame bounds are preserved exactly.
        let b0 = example4_frame().frame_bounds().unwrap();
        let b1 = g.frame_bounds().unwrap();
        assert!((b0.lower - b1.lower).abs() < 1e-10);
        assert!((b0.upper - b1.upper).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Matrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(matches!(
            example4_frame().apply_unitary(&m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn solve_inner_products_cases() {
        // Orthonormal rows in C^3.
        let h = solve_inner_products(
            &[
                Vector::real(&[1.0, 0.0, 0.0]),
                Vector::real(&[0.0, 1.0, 0.0]),
            ],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        assert!(h.distance(&Vector::real(&[1.0, 1.0, 0.0])) < 1e-12);

        // Solved 2x2 system.
        let h = solve_inner_products(
            &[Vector::real(&[1.0, 0.0]), Vector::real(&[1.0, 1.0])],
            Complex64::new(-1.0, 0.0),
        )
        .unwrap();
        assert!(h.distance(&Vector::real(&[-1.0, 0.0])) < 1e-12);

        // Zero target gives the zero solution.
        let h =
            solve_inner_products(&[Vector::real(&[0.3, 0.4])], Complex64::new(0.0, 0.0)).unwrap();
        assert!(h.norm() < 1e-14);

        let err = solve_inner_products(
            &[Vector::real(&[1.0, 1.0]), Vector::real(&[2.0, 2.0])],
            Complex64::new(1.0, 0.0),
        );
        assert!(matches!(err, Err(Error::DependentInput { .. })));
    }

    #[test]
    fn rank_and_span_intersection() {
        let e1 = Vector::real(&[1.0, 0.0]);
        let e2 = Vector::real(&[0.0, 1.0]);
        let mix = Vector::real(&[1.0, 1.0]);
        assert_eq!(rank_of(&[e1.clone(), e1.clone()]), 1);
        assert_eq!(rank_of(&[e1.clone(), e2.clone(), mix.clone()]), 2);
        assert_eq!(rank_of(&[]), 0);
        assert!(spans_intersect_trivially(
            std::slice::from_ref(&e1),
            std::slice::from_ref(&e2)
        ));
        assert!(!spans_intersect_trivially(&[e1, mix], &[e2]));
    }
}
