//! Frame constructors: probabilistic equal-norm Parseval frames for a
//! prescribed weight sequence, seeded random frames and duals, and the
//! bundled worked examples.

use crate::erasure::WeightSequence;
use crate::error::{Error, Result};
use crate::frame::{dual_space_basis, Frame};
use crate::numerics::{Complex64, Matrix, Vector};
use crate::rng::SplitMix64;

/// A constructed frame together with its verification residuals.
#[derive(Debug, Clone)]
pub struct ConstructionReport {
    pub frame: Frame,
    /// max |S_F - I|.
    pub parseval_residual: f64,
    /// max_i | ||f_i|| - 1/sqrt(q_i) |.
    pub norm_residual: f64,
}

/// Builds a Parseval frame with ||f_i|| = 1/sqrt(q_i) for a strict weight
/// sequence, in the original index order.
///
/// The construction is the constructive Schur-Horn argument: starting from
/// the diagonal projection diag(1,...,1,0,...,0), plane rotations repeatedly
/// combine one too-high and one too-low diagonal entry so that one of them
/// hits its target exactly, processing targets in descending order. The
/// frame vectors are the rows of the first n columns of the accumulated
/// rotation product, and the entries are real. Majorization of the targets
/// by the projection spectrum is checked up front and re-asserted at every
/// step rather than trusted.
pub fn prob_equal_norm_parseval(weights: &WeightSequence) -> Result<ConstructionReport> {
    if !weights.is_strict() {
        return Err(Error::WrongWeightMode {
            operation: "prob_equal_norm_parseval",
            required: "strict",
        });
    }
    let n = weights.dim();
    let count = weights.len();
    if count < n {
        return Err(Error::InvalidWeights(format!(
            "need at least {n} weights, got {count}"
        )));
    }
    let targets_original: Vec<f64> = weights.values().iter().map(|q| 1.0 / q).collect();

    // Sort targets descending (weights ascending), stable on the index.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&i, &j| {
        targets_original[j]
            .partial_cmp(&targets_original[i])
            .expect("finite targets")
            .then(i.cmp(&j))
    });
    let targets: Vec<f64> = order.iter().map(|&i| targets_original[i]).collect();

    // Majorization against the projection spectrum (1,...,1,0,...,0).
    let mut partial = 0.0;
    for (k, &d) in targets.iter().enumerate() {
        partial += d;
        let cap = ((k + 1).min(n)) as f64;
        if partial > cap + 1e-9 {
            return Err(Error::MajorizationFail(format!(
                "partial sum {partial} exceeds {cap} at position {k}"
            )));
        }
    }
    if (partial - n as f64).abs() > 1e-9 {
        return Err(Error::MajorizationFail(format!(
            "targets sum to {partial}, expected {n}"
        )));
    }

    // Working diagonal of Q Lambda Q^T; active entries stay mutually
    // uncoupled, so each step only needs the tracked values.
    let mut diag = vec![0.0f64; count];
    for d in diag.iter_mut().take(n) {
        *d = 1.0;
    }
    let mut q_acc = Matrix::identity(count);
    let mut active: Vec<usize> = (0..count).collect();
    let mut fixed_position = vec![usize::MAX; count];

    for (t, &target) in targets.iter().enumerate() {
        // Exact-match fast path keeps already-correct entries untouched.
        let matched = active
            .iter()
            .position(|&i| (diag[i] - target).abs() <= 1e-12 * (1.0 + target));
        let chosen = if let Some(pos) = matched {
            active[pos]
        } else {
            let mut lo: Option<usize> = None;
            let mut hi: Option<usize> = None;
            for &i in &active {
                if diag[i] < target {
                    if lo.is_none_or(|l| diag[i] > diag[l]) {
                        lo = Some(i);
                    }
                } else if hi.is_none_or(|h| diag[i] < diag[h]) {
                    hi = Some(i);
                }
            }
            let (Some(lo), Some(hi)) = (lo, hi) else {
                return Err(Error::MajorizationFail(format!(
                    "no bracketing pair for target {target} at step {t}"
                )));
            };
            let (x, y) = (diag[hi], diag[lo]);
            // Rotation in the (hi, lo) plane moving the hi entry to the
            // target: c^2 x + s^2 y = target.
            let s_sq = ((x - target) / (x - y)).clamp(0.0, 1.0);
            let c = (1.0 - s_sq).sqrt();
            let s = s_sq.sqrt();
            for col in 0..count {
                let vh = q_acc.get(hi, col);
                let vl = q_acc.get(lo, col);
                q_acc.set(hi, col, vh.scale(c) - vl.scale(s));
                q_acc.set(lo, col, vh.scale(s) + vl.scale(c));
            }
            diag[lo] = x + y - target;
            diag[hi] = target;
            hi
        };
        diag[chosen] = target;
        fixed_position[order[t]] = chosen;
        active.retain(|&i| i != chosen);
    }

    // Frame vectors: rows of the first n columns, inverse-permuted back to
    // the requested order.
    let mut vectors = Vec::with_capacity(count);
    for &row in &fixed_position {
        let entries: Vec<Complex64> = (0..n).map(|j| q_acc.get(row, j)).collect();
        vectors.push(Vector::new(entries)?);
    }
    let frame = Frame::new(vectors)?;

    let parseval_residual = frame.frame_operator().sub(&Matrix::identity(n)).max_abs();
    let norm_residual = frame
        .vectors()
        .iter()
        .zip(weights.values())
        .map(|(f, &q)| (f.norm() - 1.0 / q.sqrt()).abs())
        .fold(0.0, f64::max);
    if parseval_residual > 1e-10 || norm_residual > 1e-10 {
        return Err(Error::MajorizationFail(format!(
            "construction residuals too large: parseval {parseval_residual:e}, norm {norm_residual:e}"
        )));
    }
    Ok(ConstructionReport {
        frame,
        parseval_residual,
        norm_residual,
    })
}

/// Seeded random frame: entries are i.i.d. standard complex normal,
/// redrawn (up to 10 attempts) until the vectors span.
pub fn random_frame(dim: usize, count: usize, seed: u64) -> Result<Frame> {
    if dim == 0 || count < dim {
        return Err(Error::Validation(format!(
            "need count >= dim >= 1, got dim {dim}, count {count}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let attempts = 10;
    for _ in 0..attempts {
        let vectors: Vec<Vector> = (0..count)
            .map(|_| {
                Vector::new((0..dim).map(|_| rng.next_complex_gaussian()).collect())
                    .expect("gaussian entries are finite")
            })
            .collect();
        if let Ok(frame) = Frame::new(vectors) {
            return Ok(frame);
        }
    }
    Err(Error::RankFail { attempts })
}

/// Seeded random dual of F: canonical plus normal coefficients of the
/// given standard deviation over the dual-space basis. Scale zero returns
/// the canonical dual itself.
pub fn random_dual(frame: &Frame, seed: u64, scale: f64) -> Result<Frame> {
    let param = dual_space_basis(frame)?;
    let mut rng = SplitMix64::new(seed);
    let coeffs: Vec<Complex64> = (0..param.dimension())
        .map(|_| rng.next_complex_gaussian().scale(scale))
        .collect();
    param.dual_from_coefficients(&coeffs)
}

/// Seeded Haar-ish random unitary: Gaussian matrix orthonormalized by
/// modified Gram-Schmidt with re-orthogonalization.
pub fn random_unitary(dim: usize, seed: u64) -> Result<Matrix> {
    let mut rng = SplitMix64::new(seed);
    'attempt: for _ in 0..10 {
        let mut cols: Vec<Vector> = (0..dim)
            .map(|_| {
                Vector::new((0..dim).map(|_| rng.next_complex_gaussian()).collect())
                    .expect("gaussian entries are finite")
            })
            .collect();
        for j in 0..dim {
            for _pass in 0..2 {
                for i in 0..j {
                    let proj = cols[j].inner(&cols[i]);
                    cols[j] = cols[j].sub(&cols[i].scale(proj));
                }
            }
            let norm = cols[j].norm();
            if norm < 1e-8 {
                continue 'attempt;
            }
            cols[j] = cols[j].scale(Complex64::new(1.0 / norm, 0.0));
        }
        let mut u = Matrix::zeros(dim, dim);
        for (j, col) in cols.iter().enumerate() {
            u.set_column(j, col);
        }
        return Ok(u);
    }
    Err(Error::RankFail { attempts: 10 })
}

/// The two bundled worked instances, with exact rational entries.
pub fn named_example(id: &str) -> Result<(Frame, WeightSequence)> {
    match id {
        "example_4" => {
            let frame = Frame::new(vec![
                Vector::real(&[1.0, 0.0]),
                Vector::real(&[0.0, 0.5]),
                Vector::real(&[0.0, 0.5]),
            ])?;
            let weights = WeightSequence::strict(vec![1.0, 2.0, 2.0], 2)?;
            Ok((frame, weights))
        }
        "example_5" => {
            let frame = Frame::new(vec![
                Vector::real(&[1.0, 0.0]),
                Vector::real(&[0.0, 1.0]),
                Vector::real(&[1.0, 1.0]),
            ])?;
            let weights = WeightSequence::strict(vec![2.0, 1.5, 1.2], 2)?;
            Ok((frame, weights))
        }
        other => Err(Error::UnknownId(other.to_string())),
    }
}
