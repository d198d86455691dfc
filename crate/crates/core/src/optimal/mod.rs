//! Optimal-dual search over the dual space of a fixed frame, optimality
//! certificates for the canonical dual, dual-pair optimality checks, and
//! the constant-value perturbation family.

mod solver;

use crate::erasure::{lipschitz_bound, single_erasure_measure, WeightMode, WeightSequence};
use crate::error::{Error, Result};
use crate::frame::{dual_residual, dual_space_basis, rank_of, spans_intersect_trivially, Frame};
use crate::numerics::{hermitian_power, Complex64, Matrix, MatrixPower};
use solver::{Minimizer, Objective};

/// Best-vs-candidate gap below which the canonical dual is declared
/// optimal; certificates and the optimizer are compared at this threshold.
pub const OPTIMALITY_DETECTION_TOL: f64 = 1e-6;

/// Step-size rule for the subgradient phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// c / sqrt(k) with c the inverse Lipschitz bound of the objective.
    DiminishingInvSqrt,
    /// A fixed step size.
    Fixed(f64),
}

/// Starting point for the search.
#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    Canonical,
    /// Complex coefficients over the dual-space basis.
    Coefficients(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationConfig {
    pub max_iterations: usize,
    pub step_rule: StepRule,
    pub initial: StartPoint,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            max_iterations: 400,
            step_rule: StepRule::DiminishingInvSqrt,
            initial: StartPoint::Canonical,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_dual: Frame,
    /// Single-erasure measure of (F, best_dual).
    pub best_value: f64,
    /// Running minimum of the objective along the iterates; non-increasing.
    pub value_trace: Vec<f64>,
    pub canonical_value: f64,
    pub improved_over_canonical: bool,
}

/// Searches for a single-erasure optimal dual of `frame` at the given
/// lambda by minimizing the closed-form measure over the affine dual
/// space. For a basis (N = n) the canonical dual is returned immediately.
///
/// The subgradient phase follows the configured step rule from the start
/// point (subgradients taken at the smallest achieving index); a smoothing
/// Newton refinement then sharpens the best iterate. When the achieving
/// term at the start point is constant over the dual space, the start is a
/// certified global minimizer and is returned as-is.
pub fn optimize_dual(
    frame: &Frame,
    weights: &WeightSequence,
    lambda: f64,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    validate_lambda(lambda)?;
    if config.max_iterations == 0 {
        return Err(Error::Validation("max_iterations must be >= 1".into()));
    }
    if !config.tolerance.is_finite() || config.tolerance <= 0.0 {
        return Err(Error::Validation("tolerance must be positive".into()));
    }
    check_weights(frame, weights)?;

    let param = dual_space_basis(frame)?;
    if param.dimension() == 0 {
        let canonical = param.canonical;
        let value = (0..frame.len())
            .map(|i| single_erasure_measure(frame, &canonical, weights, lambda, i))
            .fold(0.0, f64::max);
        return Ok(OptimizationResult {
            best_dual: canonical,
            best_value: value,
            value_trace: vec![value],
            canonical_value: value,
            improved_over_canonical: false,
        });
    }

    let objective = Objective::new(frame, weights, lambda, &param);
    let zeros = vec![0.0; objective.dim()];
    let (canonical_value, canonical_arg) = objective.eval(&zeros);

    let x0 = match &config.initial {
        StartPoint::Canonical => zeros.clone(),
        StartPoint::Coefficients(c) => {
            if c.len() != param.dimension() {
                return Err(Error::ShapeMismatch(format!(
                    "expected {} coefficients, got {}",
                    param.dimension(),
                    c.len()
                )));
            }
            let mut x = Vec::with_capacity(2 * c.len());
            for z in c {
                x.push(z.re);
                x.push(z.im);
            }
            x
        }
    };

    let mut minimizer = Minimizer::new(&objective, x0);
    // The canonical dual is always a candidate, whatever the start point.
    if minimizer.best_value > canonical_value {
        minimizer.best_value = canonical_value;
        minimizer.best_x = zeros.clone();
    }

    // A constant achieving term pins the optimum at the start point.
    let start_certified = {
        let (_, arg) = objective.eval(&minimizer.best_x);
        objective.term_is_constant(arg)
            || (minimizer.best_x == zeros && objective.term_is_constant(canonical_arg))
    };

    if !start_certified {
        let step: Box<dyn Fn(usize) -> f64> = match config.step_rule {
            StepRule::DiminishingInvSqrt => {
                let c = 1.0 / lipschitz_bound(frame, weights);
                Box::new(move |k: usize| c / (k as f64).sqrt())
            }
            StepRule::Fixed(a) => Box::new(move |_| a),
        };
        minimizer.subgradient_descent(config.max_iterations, step);
        minimizer.newton_refine();
    }

    let best_dual = param.dual_from_coefficients(&realified_to_complex(&minimizer.best_x))?;
    let best_value = minimizer.best_value;
    Ok(OptimizationResult {
        improved_over_canonical: canonical_value - best_value > config.tolerance,
        best_dual,
        best_value,
        value_trace: minimizer.trace,
        canonical_value,
    })
}

fn realified_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect()
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Validation(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

fn check_weights(frame: &Frame, weights: &WeightSequence) -> Result<()> {
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

/// Per-theorem outcome inside a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    /// Hypotheses fail; the theorem says nothing about this instance.
    Inconclusive,
    /// The canonical dual is optimal.
    CanonicalOptimal,
    /// The canonical dual is the unique optimal dual.
    UniquelyCanonical,
    /// The canonical dual is optimal and uncountably many optima exist.
    CanonicalOptimalUncountable,
    /// The canonical dual is not the unique optimal dual.
    NotUniquelyCanonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremVerdict {
    pub applies: bool,
    pub conclusion: Conclusion,
}

impl TheoremVerdict {
    fn inconclusive() -> Self {
        TheoremVerdict {
            applies: false,
            conclusion: Conclusion::Inconclusive,
        }
    }

    fn concluded(conclusion: Conclusion) -> Self {
        TheoremVerdict {
            applies: true,
            conclusion,
        }
    }
}

/// Evaluations of every sufficiency / uniqueness condition for the
/// canonical dual, with one verdict per theorem. Certificates are always
/// produced; failed hypotheses surface as `applies = false`.
#[derive(Debug, Clone)]
pub struct OptimalityCertificate {
    pub lambda: f64,
    pub weight_mode: WeightMode,
    /// max_i q_i (lambda ||S^{-1/2} f_i||^2 + (1-lambda) ||f_i|| ||S^{-1} f_i||).
    pub l_lambda: f64,
    /// Indices attaining `l_lambda` (0-based) and the complement.
    pub lambda1: Vec<usize>,
    pub lambda2: Vec<usize>,
    pub h_intersection_trivial: bool,
    pub lambda1_independent: bool,
    /// max_i q_i ||f_i||^2.
    pub m_value: f64,
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
    pub e_intersection_trivial: bool,
    pub gamma2_independent: bool,
    pub tight: bool,
    /// The common value of q_i ||f_i||^2 when it is constant.
    pub equal_weighted_norms: Option<f64>,
    /// Whether nonemptiness of the optimal-dual set is established here
    /// (all frame vectors nonzero and lambda < 1, via compactness).
    pub delta_nonempty_established: bool,
    /// Sufficiency theorem: trivial span intersection plus an independent
    /// achieving set make the canonical dual optimal (uniquely for a
    /// basis, with uncountably many optima otherwise).
    pub canonical_optimal_sufficient: TheoremVerdict,
    /// Tight frames with q_i ||f_i||^2 constant and lambda < 1 have the
    /// canonical dual as unique optimum.
    pub unique_if_tight_equal_norms: TheoremVerdict,
    /// Tight frames with trivial E-span intersection (given a nonempty
    /// optimal set) have an optimal canonical dual.
    pub canonical_optimal_if_e_trivial: TheoremVerdict,
    /// Tight frames with M > 0 and lambda < 1: uniqueness holds exactly
    /// when the E-intersection is trivial and the Gamma_2 vectors are
    /// independent.
    pub uniqueness_iff: TheoremVerdict,
}

/// Evaluates every theorem condition for the canonical dual of `frame`.
pub fn certify_canonical(
    frame: &Frame,
    weights: &WeightSequence,
    lambda: f64,
) -> Result<OptimalityCertificate> {
    validate_lambda(lambda)?;
    check_weights(frame, weights)?;
    let n = frame.dim();
    let count = frame.len();
    let s = frame.frame_operator();
    let s_inv = hermitian_power(&s, MatrixPower::Inverse)?;
    let s_inv_sqrt = hermitian_power(&s, MatrixPower::InverseSqrt)?;

    let mut l_terms = Vec::with_capacity(count);
    let mut m_terms = Vec::with_capacity(count);
    for i in 0..count {
        let f = frame.vector(i);
        let q = weights.get(i);
        let half = s_inv_sqrt.apply(f).norm_sq();
        let inv_norm = s_inv.apply(f).norm();
        l_terms.push(q * (lambda * half + (1.0 - lambda) * f.norm() * inv_norm));
        m_terms.push(q * f.norm_sq());
    }
    let l_lambda = l_terms.iter().copied().fold(0.0, f64::max);
    let m_value = m_terms.iter().copied().fold(0.0, f64::max);

    let tie = |value: f64, level: f64| value >= level - 1e-9 * (1.0 + level);
    let lambda1: Vec<usize> = (0..count).filter(|&i| tie(l_terms[i], l_lambda)).collect();
    let lambda2: Vec<usize> = (0..count).filter(|&i| !tie(l_terms[i], l_lambda)).collect();
    let gamma1: Vec<usize> = (0..count).filter(|&i| tie(m_terms[i], m_value)).collect();
    let gamma2: Vec<usize> = (0..count).filter(|&i| !tie(m_terms[i], m_value)).collect();

    let pick = |ids: &[usize]| -> Vec<_> { ids.iter().map(|&i| frame.vector(i).clone()).collect() };
    let lambda1_vecs = pick(&lambda1);
    let lambda2_vecs = pick(&lambda2);
    let gamma1_vecs = pick(&gamma1);
    let gamma2_vecs = pick(&gamma2);

    let h_intersection_trivial = spans_intersect_trivially(&lambda1_vecs, &lambda2_vecs);
    let lambda1_independent = rank_of(&lambda1_vecs) == lambda1_vecs.len();
    let e_intersection_trivial = spans_intersect_trivially(&gamma1_vecs, &gamma2_vecs);
    let gamma2_independent = rank_of(&gamma2_vecs) == gamma2_vecs.len();

    let bounds = frame.frame_bounds()?;
    let tight = bounds.tight;
    let (min_m, max_m) = m_terms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });
    let equal_weighted_norms = if max_m - min_m <= 1e-9 * (1.0 + max_m) {
        Some(0.5 * (min_m + max_m))
    } else {
        None
    };
    let all_nonzero = frame.vectors().iter().all(|f| f.norm() > 0.0);
    let delta_nonempty_established = all_nonzero && lambda < 1.0;

    let canonical_optimal_sufficient = if h_intersection_trivial && lambda1_independent {
        TheoremVerdict::concluded(if count == n {
            Conclusion::UniquelyCanonical
        } else {
            Conclusion::CanonicalOptimalUncountable
        })
    } else {
        TheoremVerdict::inconclusive()
    };

    let unique_if_tight_equal_norms = if tight && equal_weighted_norms.is_some() && lambda < 1.0 {
        TheoremVerdict::concluded(Conclusion::UniquelyCanonical)
    } else {
        TheoremVerdict::inconclusive()
    };

    let canonical_optimal_if_e_trivial =
        if tight && e_intersection_trivial && delta_nonempty_established {
            TheoremVerdict::concluded(Conclusion::CanonicalOptimal)
        } else {
            TheoremVerdict::inconclusive()
        };

    let uniqueness_iff = if tight && lambda < 1.0 && delta_nonempty_established && m_value > 0.0 {
        TheoremVerdict::concluded(if e_intersection_trivial && gamma2_independent {
            Conclusion::UniquelyCanonical
        } else {
            Conclusion::NotUniquelyCanonical
        })
    } else {
        TheoremVerdict::inconclusive()
    };

    Ok(OptimalityCertificate {
        lambda,
        weight_mode: weights.mode(),
        l_lambda,
        lambda1,
        lambda2,
        h_intersection_trivial,
        lambda1_independent,
        m_value,
        gamma1,
        gamma2,
        e_intersection_trivial,
        gamma2_independent,
        tight,
        equal_weighted_norms,
        delta_nonempty_established,
        canonical_optimal_sufficient,
        unique_if_tight_equal_norms,
        canonical_optimal_if_e_trivial,
        uniqueness_iff,
    })
}

/// Verdict of the exact optimal-pair characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairVerdict {
    Optimal,
    /// First index (0-based) violating the characterization.
    NotOptimal {
        witness: usize,
    },
}

/// Checks whether (F, G) is an optimal dual pair for the given lambda via
/// the exact characterization: <f_i, g_i> = 1/q_i (lambda > 0 legs) and
/// ||f_i|| ||g_i|| = 1/q_i (lambda < 1 legs), each within 1e-9. Requires
/// strict weights; the characterization is meaningless otherwise.
pub fn pair_optimality(
    frame: &Frame,
    dual: &Frame,
    weights: &WeightSequence,
    lambda: f64,
) -> Result<PairVerdict> {
    validate_lambda(lambda)?;
    check_weights(frame, weights)?;
    if weights.mode() != WeightMode::Strict {
        return Err(Error::WrongWeightMode {
            operation: "pair_optimality",
            required: "strict",
        });
    }
    let residual = dual_residual(frame, dual)?;
    if residual > 1e-9 {
        return Err(Error::NotADualPair { residual });
    }
    const TOL: f64 = 1e-9;
    for i in 0..frame.len() {
        let f = frame.vector(i);
        let g = dual.vector(i);
        let target = 1.0 / weights.get(i);
        let inner_ok = (f.inner(g) - Complex64::new(target, 0.0)).norm() <= TOL;
        let norm_ok = (f.norm() * g.norm() - target).abs() <= TOL;
        let ok = if lambda == 0.0 {
            norm_ok
        } else if lambda == 1.0 {
            inner_ok
        } else {
            inner_ok && norm_ok
        };
        if !ok {
            return Ok(PairVerdict::NotOptimal { witness: i });
        }
    }
    Ok(PairVerdict::Optimal)
}

/// The constant-value family G_t = canonical + t * direction available
/// when the sufficiency theorem holds with N > n.
#[derive(Debug, Clone)]
pub struct PerturbationFamily {
    canonical: Frame,
    direction: Matrix,
    /// The shared objective value along the family.
    pub level: f64,
    /// Largest step (found by bisection) keeping every off-peak term
    /// strictly below the level.
    pub delta: f64,
}

impl PerturbationFamily {
    pub fn dual_at(&self, t: f64) -> Result<Frame> {
        let synthesis = self
            .canonical
            .synthesis()
            .add(&self.direction.scale(Complex64::new(t, 0.0)));
        Frame::from_synthesis(&synthesis)
    }
}

/// Builds the perturbation family for a frame satisfying the sufficiency
/// hypotheses (trivial span intersection, independent achieving set,
/// N > n). The direction must lie in the homogeneous dual space, vanish on
/// the achieving set and be nonzero somewhere off it.
pub fn build_perturbation_family(
    frame: &Frame,
    weights: &WeightSequence,
    lambda: f64,
    direction: &Matrix,
) -> Result<PerturbationFamily> {
    let certificate = certify_canonical(frame, weights, lambda)?;
    if !certificate.canonical_optimal_sufficient.applies {
        return Err(Error::HypothesesFail(
            "sufficiency theorem hypotheses do not hold (span intersection or independence)".into(),
        ));
    }
    if frame.len() == frame.dim() {
        return Err(Error::HypothesesFail(
            "a basis admits no nontrivial dual perturbation".into(),
        ));
    }
    if direction.rows() != frame.dim() || direction.cols() != frame.len() {
        return Err(Error::HypothesesFail(format!(
            "direction must be {}x{}",
            frame.dim(),
            frame.len()
        )));
    }
    let hom_residual = direction.mul(&frame.analysis()).max_abs();
    if hom_residual > 1e-10 * (1.0 + direction.max_abs()) {
        return Err(Error::HypothesesFail(format!(
            "direction is not in the homogeneous dual space (residual {hom_residual:e})"
        )));
    }
    let scale = direction.max_abs();
    for &i in &certificate.lambda1 {
        if direction.column(i).norm() > 1e-12 * (1.0 + scale) {
            return Err(Error::HypothesesFail(format!(
                "direction must vanish on achieving index {i}"
            )));
        }
    }
    if !certificate
        .lambda2
        .iter()
        .any(|&i| direction.column(i).norm() > 0.0)
    {
        return Err(Error::HypothesesFail(
            "direction vanishes on the whole complement".into(),
        ));
    }

    let canonical = frame.canonical_dual()?;
    let level = certificate.l_lambda;
    let off_peak_below = |t: f64| -> bool {
        certificate.lambda2.iter().all(|&i| {
            let g = canonical
                .vector(i)
                .add(&direction.column(i).scale(Complex64::new(t, 0.0)));
            let f = frame.vector(i);
            let term = weights.get(i)
                * (lambda * f.inner(&g).norm() + (1.0 - lambda) * f.norm() * g.norm());
            term < level
        })
    };

    // Bisection for the largest admissible |t| on [0, 2 / ||direction||].
    let hi_cap = 2.0 / direction.frobenius();
    let delta = if off_peak_below(hi_cap) {
        hi_cap
    } else {
        let mut lo = 0.0f64;
        let mut hi = hi_cap;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if off_peak_below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };

    Ok(PerturbationFamily {
        canonical,
        direction: direction.clone(),
        level,
        delta,
    })
}

/// Convenience wrapper returning G_t directly.
pub fn perturbation_family(
    frame: &Frame,
    weights: &WeightSequence,
    lambda: f64,
    direction: &Matrix,
    t: f64,
) -> Result<Frame> {
    build_perturbation_family(frame, weights, lambda, direction)?.dual_at(t)
}

/// Canonical-dual optimality under the three measures (operator norm,
/// spectral radius, lambda-average), each decided by an optimizer run.
#[derive(Debug, Clone, Copy)]
pub struct CrossMeasureReport {
    pub lambda: f64,
    /// Canonical optimal at lambda = 0.
    pub operator_norm_optimal: bool,
    /// Canonical optimal at lambda = 1.
    pub spectral_radius_optimal: bool,
    /// Canonical optimal at the given lambda.
    pub averaged_optimal: bool,
    pub tight: bool,
    /// The equivalence theorem covers tight frames with lambda < 1 only.
    pub in_theorem_scope: bool,
}

impl CrossMeasureReport {
    pub fn all_agree(&self) -> bool {
        self.operator_norm_optimal == self.spectral_radius_optimal
            && self.spectral_radius_optimal == self.averaged_optimal
    }
}

/// Runs the optimizer at lambda in {0, 1, given} and reports whether the
/// canonical dual attains each optimum. Non-tight frames still get a
/// report, flagged as outside the equivalence theorem's scope.
pub fn cross_measure_report(
    frame: &Frame,
    weights: &WeightSequence,
    lambda: f64,
) -> Result<CrossMeasureReport> {
    validate_lambda(lambda)?;
    let config = OptimizationConfig::default();
    let mut optimal = [false; 3];
    for (slot, leg) in [0.0, 1.0, lambda].into_iter().enumerate() {
        let run = optimize_dual(frame, weights, leg, &config)?;
        optimal[slot] = run.canonical_value - run.best_value <= OPTIMALITY_DETECTION_TOL;
    }
    let tight = frame.frame_bounds()?.tight;
    Ok(CrossMeasureReport {
        lambda,
        operator_norm_optimal: optimal[0],
        spectral_radius_optimal: optimal[1],
        averaged_optimal: optimal[2],
        tight,
        in_theorem_scope: tight && lambda < 1.0,
    })
}

/// If the canonical dual of F is spectral-radius optimal, the Parseval
/// frame S^{-1/2} F must have itself as an averaged-measure optimal dual.
/// Verifies the conclusion by optimization and returns the confirmation.
pub fn s_half_transfer_check(frame: &Frame, weights: &WeightSequence, lambda: f64) -> Result<bool> {
    validate_lambda(lambda)?;
    let config = OptimizationConfig::default();
    let spectral = optimize_dual(frame, weights, 1.0, &config)?;
    if spectral.canonical_value - spectral.best_value > OPTIMALITY_DETECTION_TOL {
        return Err(Error::PrerequisiteNotMet(
            "the canonical dual is not spectral-radius optimal for this frame".into(),
        ));
    }
    let s = frame.frame_operator();
    let s_inv_sqrt = hermitian_power(&s, MatrixPower::InverseSqrt)?;
    let parseval = frame.transform(&s_inv_sqrt)?;
    let run = optimize_dual(&parseval, weights, lambda, &config)?;
    Ok(run.canonical_value - run.best_value <= OPTIMALITY_DETECTION_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::named_example;
    use crate::erasure::{max_measure, MeasureSpec};
    use crate::frame::is_dual_pair;
    use crate::numerics::Vector;

    fn default_cfg() -> OptimizationConfig {
        OptimizationConfig::default()
    }

    #[test]
    fn example4_canonical_is_returned_exactly() {
        let (f, q) = named_example("example_4").unwrap();
        let canonical = f.canonical_dual().unwrap();
        for lambda in [0.0, 0.25, 0.5, 0.75] {
            let run = optimize_dual(&f, &q, lambda, &default_cfg()).unwrap();
            assert!((run.best_value - 1.0).abs() < 1e-12, "lambda {lambda}");
            assert_eq!(run.best_dual.synthesis(), canonical.synthesis());
            assert!(!run.improved_over_canonical);
        }
    }

    #[test]
    fn example5_spectral_optimum_is_one() {
        let (f, q) = named_example("example_5").unwrap();
        let run = optimize_dual(&f, &q, 1.0, &default_cfg()).unwrap();
        assert!((run.canonical_value - 4.0 / 3.0).abs() < 1e-12);
        assert!(
            (run.best_value - 1.0).abs() < 1e-9,
            "best {}",
            run.best_value
        );
        assert!(run.improved_over_canonical);
        assert!(is_dual_pair(&f, &run.best_dual, 1e-9).unwrap());
        // The equalizing dual sits at alpha = -1/6, beta = 0.
        let g1 = run.best_dual.vector(0);
        assert!(
            (g1.get(0).re - 0.5).abs() < 1e-4,
            "alpha off: {}",
            g1.get(0)
        );
        assert!(g1.get(1).re.abs() - 1.0 / 3.0 < 1e-4);
        // Trace is the running minimum.
        for w in run.value_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn example5_norm_optimum_strictly_improves() {
        let (f, q) = named_example("example_5").unwrap();
        let run = optimize_dual(&f, &q, 0.0, &default_cfg()).unwrap();
        let canonical_norm = 2.0 * 5f64.sqrt() / 3.0;
        assert!((run.canonical_value - canonical_norm).abs() < 1e-12);
        assert!(run.best_value < canonical_norm - 1e-2);
        assert!(run.best_value >= 1.0 - 1e-9);
    }

    #[test]
    fn basis_returns_canonical_immediately() {
        let f = crate::construct::random_frame(3, 3, 5).unwrap();
        let q = crate::erasure::WeightSequence::relaxed(vec![1.0, 2.0, 3.0], 3).unwrap();
        let run = optimize_dual(&f, &q, 0.5, &default_cfg()).unwrap();
        assert_eq!(run.value_trace.len(), 1);
        assert!(!run.improved_over_canonical);
    }

    #[test]
    fn rerun_is_bit_identical() {
        let (f, q) = named_example("example_5").unwrap();
        let a = optimize_dual(&f, &q, 0.35, &default_cfg()).unwrap();
        let b = optimize_dual(&f, &q, 0.35, &default_cfg()).unwrap();
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.best_dual.synthesis(), b.best_dual.synthesis());
    }

    #[test]
    fn example4_certificate_is_inconclusive_for_sufficiency() {
        let (f, q) = named_example("example_4").unwrap();
        let cert = certify_canonical(&f, &q, 0.5).unwrap();
        assert!((cert.l_lambda - 1.0).abs() < 1e-12);
        assert_eq!(cert.lambda1, vec![0, 1, 2]);
        assert!(cert.lambda2.is_empty());
        assert!(cert.h_intersection_trivial);
        assert!(!cert.lambda1_independent);
        assert!(!cert.canonical_optimal_sufficient.applies);
        assert_eq!(
            cert.canonical_optimal_sufficient.conclusion,
            Conclusion::Inconclusive
        );
    }

    #[test]
    fn tight_equal_norm_certificate_is_unique() {
        let q = crate::erasure::WeightSequence::strict(vec![1.5, 1.5, 1.5], 2).unwrap();
        let f = crate::construct::prob_equal_norm_parseval(&q)
            .unwrap()
            .frame;
        let cert = certify_canonical(&f, &q, 0.25).unwrap();
        assert!(cert.tight);
        assert!(cert.equal_weighted_norms.is_some());
        assert!(cert.unique_if_tight_equal_norms.applies);
        assert_eq!(
            cert.unique_if_tight_equal_norms.conclusion,
            Conclusion::UniquelyCanonical
        );
        assert!(cert.uniqueness_iff.applies);
    }

    #[test]
    fn orthonormal_basis_certificate() {
        let f =
            crate::frame::Frame::new(vec![Vector::real(&[1.0, 0.0]), Vector::real(&[0.0, 1.0])])
                .unwrap();
        let q = crate::erasure::WeightSequence::strict(vec![1.0, 1.0], 2).unwrap();
        let cert = certify_canonical(&f, &q, 0.5).unwrap();
        assert!(cert.canonical_optimal_sufficient.applies);
        assert_eq!(
            cert.canonical_optimal_sufficient.conclusion,
            Conclusion::UniquelyCanonical
        );
    }

    #[test]
    fn pair_optimality_examples() {
        // A probabilistic equal-norm Parseval frame paired with itself.
        let q = crate::erasure::WeightSequence::strict(vec![2.0, 2.0, 2.0, 2.0], 2).unwrap();
        let f = crate::construct::prob_equal_norm_parseval(&q)
            .unwrap()
            .frame;
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let verdict = pair_optimality(&f, &f, &q, lambda).unwrap();
            assert_eq!(verdict, PairVerdict::Optimal, "lambda {lambda}");
            // Part 1 of the optimal-pair theorem: the measure equals 1.
            let spec = MeasureSpec::new(lambda, 1).unwrap();
            let report = max_measure(&f, &f, &q, &spec).unwrap();
            assert!((report.value - 1.0).abs() < 1e-9);
        }

        let (f5, q5) = named_example("example_5").unwrap();
        let canonical = f5.canonical_dual().unwrap();
        let verdict = pair_optimality(&f5, &canonical, &q5, 0.5).unwrap();
        assert_eq!(verdict, PairVerdict::NotOptimal { witness: 0 });

        let basis =
            crate::frame::Frame::new(vec![Vector::real(&[1.0, 0.0]), Vector::real(&[0.0, 1.0])])
                .unwrap();
        let q1 = crate::erasure::WeightSequence::strict(vec![1.0, 1.0], 2).unwrap();
        assert_eq!(
            pair_optimality(&basis, &basis, &q1, 0.5).unwrap(),
            PairVerdict::Optimal
        );
    }

    #[test]
    fn pair_optimality_requires_strict_mode() {
        let (f, _) = named_example("example_5").unwrap();
        let relaxed = crate::erasure::WeightSequence::relaxed(vec![1.0, 1.0, 1.0], 2).unwrap();
        let canonical = f.canonical_dual().unwrap();
        assert!(matches!(
            pair_optimality(&f, &canonical, &relaxed, 0.5),
            Err(Error::WrongWeightMode { .. })
        ));
    }

    #[test]
    fn perturbation_family_on_split_frame() {
        // {e1, f2, f3} with weights isolating index 0 as the achieving set.
        let f = crate::frame::Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 0.5]),
            Vector::real(&[0.0, 0.5]),
        ])
        .unwrap();
        let q = crate::erasure::WeightSequence::relaxed(vec![1.0, 1.5, 1.5], 2).unwrap();
        let lambda = 0.5;
        let cert = certify_canonical(&f, &q, lambda).unwrap();
        assert_eq!(cert.lambda1, vec![0]);
        assert!(cert.canonical_optimal_sufficient.applies);

        // Direction from the null vector (0, 1, -1)/sqrt(2) placed in row 1.
        let mut direction = crate::numerics::Matrix::zeros(2, 3);
        let h = 0.5f64.sqrt();
        direction.set(1, 1, Complex64::new(h, 0.0));
        direction.set(1, 2, Complex64::new(-h, 0.0));
        let family = build_perturbation_family(&f, &q, lambda, &direction).unwrap();
        assert!(family.delta > 0.0);
        assert!((family.level - 1.0).abs() < 1e-12);

        let at_zero = family.dual_at(0.0).unwrap();
        assert!(at_zero.distance(&f.canonical_dual().unwrap()) < 1e-12);

        for k in 0..10 {
            let t = family.delta * (k as f64 / 9.0 * 2.0 - 1.0) * 0.999;
            let g = family.dual_at(t).unwrap();
            assert!(is_dual_pair(&f, &g, 1e-9).unwrap());
            let spec = MeasureSpec::new(lambda, 1).unwrap();
            let value = max_measure(&f, &g, &q, &spec).unwrap().value;
            assert!((value - family.level).abs() < 1e-9, "t {t}: {value}");
        }
    }

    #[test]
    fn perturbation_family_rejects_dependent_achievers() {
        // {e1, e1, e2, e2}: any weights putting the peak on a repeated
        // direction leave the achieving set dependent.
        let f = crate::frame::Frame::new(vec![
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[1.0, 0.0]),
            Vector::real(&[0.0, 1.0]),
            Vector::real(&[0.0, 1.0]),
        ])
        .unwrap();
        let q = crate::erasure::WeightSequence::relaxed(vec![1.0, 1.0, 2.0, 2.0], 2).unwrap();
        let lambda = 0.5;
        let cert = certify_canonical(&f, &q, lambda).unwrap();
        assert_eq!(cert.lambda1, vec![2, 3]);
        assert!(cert.h_intersection_trivial);
        assert!(!cert.lambda1_independent);
        let direction = crate::numerics::Matrix::zeros(2, 4);
        assert!(matches!(
            build_perturbation_family(&f, &q, lambda, &direction),
            Err(Error::HypothesesFail(_))
        ));

        // The constant-value family still exists; checked by direct
        // evaluation: u = {v, -v, 0, 0} keeps the off-peak terms below the
        // level while the peak terms never move.
        let canonical = f.canonical_dual().unwrap();
        let v = Vector::new(vec![Complex64::new(0.3, 0.0), Complex64::new(0.4, 0.0)]).unwrap();
        for t in [-0.2, -0.1, 0.05, 0.15] {
            let tv = v.scale(Complex64::new(t, 0.0));
            let dual = crate::frame::Frame::new(vec![
                canonical.vector(0).add(&tv),
                canonical.vector(1).sub(&tv),
                canonical.vector(2).clone(),
                canonical.vector(3).clone(),
            ])
            .unwrap();
            assert!(is_dual_pair(&f, &dual, 1e-12).unwrap());
            let spec = MeasureSpec::new(lambda, 1).unwrap();
            let value = max_measure(&f, &dual, &q, &spec).unwrap().value;
            assert!((value - cert.l_lambda).abs() <= 1e-12, "t {t}: {value}");
        }
    }

    #[test]
    fn cross_measures_on_example5_frame() {
        let (f, q) = named_example("example_5").unwrap();
        let report = cross_measure_report(&f, &q, 0.5).unwrap();
        assert!(!report.tight);
        assert!(!report.in_theorem_scope);
        assert!(!report.operator_norm_optimal);
        assert!(!report.spectral_radius_optimal);
        assert!(!report.averaged_optimal);
    }

    #[test]
    fn cross_measures_on_equal_norm_tight_frame() {
        let q = crate::erasure::WeightSequence::strict(vec![1.5, 1.5, 1.5], 2).unwrap();
        let f = crate::construct::prob_equal_norm_parseval(&q)
            .unwrap()
            .frame;
        let report = cross_measure_report(&f, &q, 0.5).unwrap();
        assert!(report.in_theorem_scope);
        assert!(report.operator_norm_optimal);
        assert!(report.spectral_radius_optimal);
        assert!(report.averaged_optimal);
        assert!(report.all_agree());
    }

    #[test]
    fn s_half_transfer() {
        let q = crate::erasure::WeightSequence::strict(vec![1.5, 1.5, 1.5], 2).unwrap();
        let f = crate::construct::prob_equal_norm_parseval(&q)
            .unwrap()
            .frame;
        assert!(s_half_transfer_check(&f, &q, 0.5).unwrap());

        let basis =
            crate::frame::Frame::new(vec![Vector::real(&[2.0, 0.0]), Vector::real(&[1.0, 1.0])])
                .unwrap();
        let q2 = crate::erasure::WeightSequence::strict(vec![1.0, 1.0], 2).unwrap();
        assert!(s_half_transfer_check(&basis, &q2, 0.7).unwrap());

        let (f5, q5) = named_example("example_5").unwrap();
        assert!(matches!(
            s_half_transfer_check(&f5, &q5, 0.5),
            Err(Error::PrerequisiteNotMet(_))
        ));
    }
}
