//! The probability model for erased coefficients, weight number sequences,
//! the probabilistic error operator and the three erasure measures.
//!
//! For a dual pair (F, G), weights {q_i} and an index set L, the error
//! operator is E f = sum_{i in L} q_i <f, f_i> g_i. Its measure is the
//! lambda-weighted average of spectral radius and operator norm; the
//! headline quantity is the maximum of that measure over all erasure sets
//! of a fixed cardinality.

use crate::error::{Error, Result};
use crate::frame::{dual_residual, Frame};
use crate::numerics::{singular_values, spectral_radius, Complex64, Matrix};

/// Erasure probabilities: 0 <= p_i < 1 and sum p_i = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySequence {
    p: Vec<f64>,
}

impl ProbabilitySequence {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidProbabilities("empty sequence".into()));
        }
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() || !(0.0..1.0).contains(&x) {
                return Err(Error::InvalidProbabilities(format!(
                    "p[{i}] = {x} is outside [0, 1)"
                )));
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities must sum to 1, got {total}"
            )));
        }
        Ok(ProbabilitySequence { p })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }
}

/// Validation mode for a weight sequence.
///
/// `Strict` is the regime of the optimal-pair theorems: q_i >= 1 and
/// sum 1/q_i = n. `Relaxed` only requires positive weights and is the
/// regime of the fixed-frame optimal-dual theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Strict,
    Relaxed,
}

/// The weight number sequence driving every erasure measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    q: Vec<f64>,
    dim: usize,
    mode: WeightMode,
}

impl WeightSequence {
    /// Strict weights: q_i >= 1 for all i and sum 1/q_i = n (within 1e-10).
    pub fn strict(q: Vec<f64>, dim: usize) -> Result<Self> {
        for (i, &x) in q.iter().enumerate() {
            if !x.is_finite() || x < 1.0 {
                return Err(Error::InvalidWeights(format!(
                    "strict mode needs q[{i}] >= 1, got {x}"
                )));
            }
        }
        let harmonic: f64 = q.iter().map(|x| 1.0 / x).sum();
        if (harmonic - dim as f64).abs() > 1e-10 {
            return Err(Error::InvalidWeights(format!(
                "strict mode needs sum 1/q_i = {dim}, got {harmonic}"
            )));
        }
        Ok(WeightSequence {
            q,
            dim,
            mode: WeightMode::Strict,
        })
    }

    /// Relaxed weights: any positive sequence.
    pub fn relaxed(q: Vec<f64>, dim: usize) -> Result<Self> {
        for (i, &x) in q.iter().enumerate() {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "weights must be positive, q[{i}] = {x}"
                )));
            }
        }
        Ok(WeightSequence {
            q,
            dim,
            mode: WeightMode::Relaxed,
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn is_strict(&self) -> bool {
        self.mode == WeightMode::Strict
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn get(&self, i: usize) -> f64 {
        self.q[i]
    }
}

/// q_i = (1 / (1 - p_i)) * ((N - 1) / n). The result always satisfies
/// sum 1/q_i = n; for N > n every q_i >= 1 and the sequence validates in
/// strict mode. (For N = n a weight can drop below 1, in which case the
/// sequence is returned in relaxed mode.)
pub fn weights_from_probabilities(p: &ProbabilitySequence, dim: usize) -> Result<WeightSequence> {
    let count = p.len();
    if count < 2 {
        return Err(Error::InvalidProbabilities(
            "need at least two coefficients".into(),
        ));
    }
    let factor = (count as f64 - 1.0) / dim as f64;
    let q: Vec<f64> = p.values().iter().map(|&pi| factor / (1.0 - pi)).collect();
    WeightSequence::strict(q.clone(), dim).or_else(|_| WeightSequence::relaxed(q, dim))
}

/// A sorted set of erased coefficient indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ErasureSet {
    indices: Vec<usize>,
}

impl ErasureSet {
    pub fn new(mut indices: Vec<usize>, total: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidErasureSet("duplicate index".into()));
        }
        if indices.iter().any(|&i| i >= total) {
            return Err(Error::InvalidErasureSet(format!(
                "index out of range for N = {total}"
            )));
        }
        Ok(ErasureSet { indices })
    }

    pub fn single(i: usize) -> Self {
        ErasureSet { indices: vec![i] }
    }

    pub fn empty() -> Self {
        ErasureSet {
            indices: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// Selects the measure: the lambda-average of spectral radius and operator
/// norm, maximized over erasure sets of cardinality `erasures`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    lambda: f64,
    erasures: usize,
}

impl MeasureSpec {
    pub fn new(lambda: f64, erasures: usize) -> Result<Self> {
        if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Validation(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        if erasures == 0 {
            return Err(Error::Validation("erasure count must be >= 1".into()));
        }
        Ok(MeasureSpec { lambda, erasures })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn erasures(&self) -> usize {
        self.erasures
    }
}

/// Result of maximizing the measure over all erasure sets of one size.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    /// The maximum measure.
    pub value: f64,
    /// Lexicographically smallest set attaining it.
    pub argmax: ErasureSet,
    /// Every enumerated set with its measure, in lexicographic order.
    pub per_location: Vec<(ErasureSet, f64)>,
}

const SUBSET_CAP: usize = 100_000;

fn check_dual_pair(frame: &Frame, dual: &Frame) -> Result<()> {
    let residual = dual_residual(frame, dual)?;
    if residual > 1e-9 {
        return Err(Error::NotADualPair { residual });
    }
    Ok(())
}

fn check_weight_len(frame: &Frame, weights: &WeightSequence) -> Result<()> {
    if weights.len() != frame.len() || weights.dim() != frame.dim() {
        return Err(Error::ShapeMismatch(format!(
            "weights are for ({}, {}), frame is ({}, {})",
            weights.len(),
            weights.dim(),
            frame.len(),
            frame.dim()
        )));
    }
    Ok(())
}

/// E_{L,F,G} = sum_{i in L} q_i g_i f_i^H as an n x n matrix.
pub fn error_operator(
    frame: &Frame,
    dual: &Frame,
    weights: &WeightSequence,
    set: &ErasureSet,
) -> Result<Matrix> {
    check_dual_pair(frame, dual)?;
    check_weight_len(frame, weights)?;
    if set.indices().iter().any(|&i| i >= frame.len()) {
        return Err(Error::InvalidErasureSet(format!(
            "index out of range for N = {}",
            frame.len()
        )));
    }
    let n = frame.dim();
    let mut e = Matrix::zeros(n, n);
    for &i in set.indices() {
        let term = Matrix::outer(dual.vector(i), frame.vector(i))
            .scale(Complex64::new(weights.get(i), 0.0));
        e = e.add(&term);
    }
    Ok(e)
}

/// lambda * rho(E) + (1 - lambda) * sigma_max(E) through the generic
/// eigenvalue / singular-value path.
pub fn measure_for_set(
    frame: &Frame,
    dual: &Frame,
    weights: &WeightSequence,
    lambda: f64,
    set: &ErasureSet,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Validation(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let e = error_operator(frame, dual, weights, set)?;
    let rho = if set.is_empty() {
        0.0
    } else {
        spectral_radius(&e)?
    };
    let sigma = if set.is_empty() {
        0.0
    } else {
        singular_values(&e)?[0]
    };
    Ok(lambda * rho + (1.0 - lambda) * sigma)
}

/// Closed form of the single-erasure measure:
/// q_i (lambda |<f_i, g_i>| + (1 - lambda) ||f_i|| ||g_i||).
///
/// For a rank-one error operator the nonzero eigenvalue is q_i <g_i, f_i>
/// and the operator norm is q_i ||f_i|| ||g_i||, so this is exact; the
/// generic path in [`measure_for_set`] serves as its independent check.
pub fn single_erasure_measure(
    frame: &Frame,
    dual: &Frame,
    weights: &WeightSequence,
    lambda: f64,
    index: usize,
) -> f64 {
    let f = frame.vector(index);
    let g = dual.vector(index);
    let q = weights.get(index);
    q * (lambda * f.inner(g).norm() + (1.0 - lambda) * f.norm() * g.norm())
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}

fn lexicographic_subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..m).collect();
    loop {
        out.push(current.clone());
        // Advance to the next m-combination of {0..n}.
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in (i + 1)..m {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Exact maximum of the measure over all erasure sets of the requested
/// cardinality. Single erasures use the closed form of the rank-one
/// operator (cross-checked against the generic path in debug builds);
/// larger sets are enumerated explicitly up to a cap of 100000 subsets.
/// Ties are broken toward the lexicographically smallest index set.
pub fn max_measure(
    frame: &Frame,
    dual: &Frame,
    weights: &WeightSequence,
    spec: &MeasureSpec,
) -> Result<MeasureReport> {
    check_dual_pair(frame, dual)?;
    check_weight_len(frame, weights)?;
    let n = frame.len();
    let m = spec.erasures();
    if m > n {
        return Err(Error::InvalidErasureSet(format!(
            "cannot erase {m} of {n} coefficients"
        )));
    }
    let subsets = binomial(n, m).unwrap_or(usize::MAX);
    if subsets > SUBSET_CAP {
        return Err(Error::TooManySubsets {
            subsets,
            cap: SUBSET_CAP,
        });
    }

    let mut per_location = Vec::with_capacity(subsets);
    if m == 1 {
        for i in 0..n {
            let value = single_erasure_measure(frame, dual, weights, spec.lambda(), i);
            #[cfg(debug_assertions)]
            {
                let generic =
                    measure_for_set(frame, dual, weights, spec.lambda(), &ErasureSet::single(i))?;
                debug_assert!(
                    (generic - value).abs() <= 1e-8 * (1.0 + value),
                    "closed form {value} vs generic {generic} at index {i}"
                );
            }
            per_location.push((ErasureSet::single(i), value));
        }
    } else {
        for indices in lexicographic_subsets(n, m) {
            let set = ErasureSet { indices };
            let value = measure_for_set(frame, dual, weights, spec.lambda(), &set)?;
            per_location.push((set, value));
        }
    }

    let mut best = 0usize;
    for (k, entry) in per_location.iter().enumerate() {
        if entry.1 > per_location[best].1 {
            best = k;
        }
    }
    Ok(MeasureReport {
        value: per_location[best].1,
        argmax: per_location[best].0.clone(),
        per_location,
    })
}

/// B = max_i q_i ||f_i||: the measure is B-Lipschitz in the dual with
/// respect to the 2-norm on vector sequences.
pub fn lipschitz_bound(frame: &Frame, weights: &WeightSequence) -> f64 {
    frame
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, f)| weights.get(i) * f.norm())
        .fold(0.0, f64::max)
}

pub(crate) fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
