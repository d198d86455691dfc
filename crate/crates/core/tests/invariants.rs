//! Cross-module property suites: reconstruction identities, the dual-space
//! parameterization, measure orderings, and theorem-level consistency
//! between certificates and the optimizer.

use optidual::construct::{named_example, random_dual, random_frame, random_unitary};
use optidual::erasure::{
    error_operator, max_measure, weights_from_probabilities, ErasureSet, MeasureSpec,
    ProbabilitySequence, WeightSequence,
};
use optidual::frame::{dual_space_basis, is_dual_pair, DualPair, Frame};
use optidual::numerics::{singular_values, spectral_radius, Complex64, Vector};
use optidual::optimal::{
    certify_canonical, optimize_dual, pair_optimality, OptimizationConfig, PairVerdict,
    OPTIMALITY_DETECTION_TOL,
};
use optidual::rng::SplitMix64;

fn random_signal(rng: &mut SplitMix64, dim: usize) -> Vector {
    Vector::new((0..dim).map(|_| rng.next_complex_gaussian()).collect()).unwrap()
}

#[test]
fn reconstruction_both_ways() {
    let mut rng = SplitMix64::new(21);
    for _ in 0..10 {
        let n = 2 + (rng.next_u64() % 3) as usize;
        let count = n + (rng.next_u64() % 4) as usize;
        let frame = random_frame(n, count, rng.next_u64()).unwrap();
        let dual = random_dual(&frame, rng.next_u64(), 0.5).unwrap();
        let pair = DualPair::new(frame.clone(), dual.clone()).unwrap();
        for _ in 0..100 {
            let f = random_signal(&mut rng, n);
            // sum <f, g_i> f_i = f
            let mut rebuilt = Vector::zero(n);
            for (fi, gi) in pair.frame().vectors().iter().zip(pair.dual().vectors()) {
                rebuilt = rebuilt.add(&fi.scale(f.inner(gi)));
            }
            assert!(rebuilt.distance(&f) <= 1e-9 * f.norm().max(1.0));
            // Flipped roles reconstruct as well.
            let mut flipped = Vector::zero(n);
            for (fi, gi) in frame.vectors().iter().zip(dual.vectors()) {
                flipped = flipped.add(&gi.scale(f.inner(fi)));
            }
            assert!(flipped.distance(&f) <= 1e-9 * f.norm().max(1.0));
        }
    }
}

#[test]
fn homogeneous_basis_annihilates_analysis() {
    let mut rng = SplitMix64::new(22);
    for _ in 0..5 {
        let n = 2 + (rng.next_u64() % 2) as usize;
        let count = n + 1 + (rng.next_u64() % 3) as usize;
        let frame = random_frame(n, count, rng.next_u64()).unwrap();
        let param = dual_space_basis(&frame).unwrap();
        assert_eq!(param.dimension(), n * (count - n));
        for u in &param.basis {
            assert!(u.mul(&frame.analysis()).max_abs() <= 1e-10);
            // sum_i <f, f_i> u_i = 0 for random f.
            for _ in 0..100 {
                let f = random_signal(&mut rng, n);
                let mut acc = Vector::zero(n);
                for (i, fi) in frame.vectors().iter().enumerate() {
                    acc = acc.add(&u.column(i).scale(f.inner(fi)));
                }
                assert!(acc.norm() <= 1e-10 * (1.0 + f.norm()));
            }
        }
        // Frobenius orthonormality of the basis.
        for (a, ua) in param.basis.iter().enumerate() {
            for (b, ub) in param.basis.iter().enumerate() {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..ua.rows() {
                    for j in 0..ua.cols() {
                        dot += ub.get(i, j).conj() * ua.get(i, j);
                    }
                }
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - Complex64::new(expected, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn parameterization_is_complete() {
    // Every random-coefficient dual verifies, and projecting a verified
    // dual back onto the basis reproduces it.
    let mut rng = SplitMix64::new(23);
    for _ in 0..20 {
        let n = 2 + (rng.next_u64() % 2) as usize;
        let count = n + 1 + (rng.next_u64() % 2) as usize;
        let frame = random_frame(n, count, rng.next_u64()).unwrap();
        let param = dual_space_basis(&frame).unwrap();
        let dual = random_dual(&frame, rng.next_u64(), 1.3).unwrap();
        assert!(is_dual_pair(&frame, &dual, 1e-9).unwrap());
        let coeffs = param.coefficients_for(&dual);
        let rebuilt = param.dual_from_coefficients(&coeffs).unwrap();
        assert!(rebuilt.distance(&dual) <= 1e-9);
    }
}

#[test]
fn measure_ordering_spectral_below_norm() {
    // rho(E) <= ||E|| on random error operators, hence r <= A_lambda <= O.
    let mut rng = SplitMix64::new(24);
    for trial in 0..1000 {
        let n = 2 + (rng.next_u64() % 2) as usize;
        let count = n + 1 + (rng.next_u64() % 2) as usize;
        let frame = random_frame(n, count, rng.next_u64()).unwrap();
        let dual = random_dual(&frame, rng.next_u64(), 0.5).unwrap();
        let q_raw: Vec<f64> = (0..count).map(|_| 0.5 + rng.next_f64() * 2.0).collect();
        let weights = WeightSequence::relaxed(q_raw, n).unwrap();
        let m = 1 + (trial % 2);
        let mut indices: Vec<usize> = (0..count).collect();
        indices.truncate(m);
        let set = ErasureSet::new(indices, count).unwrap();
        let e = error_operator(&frame, &dual, &weights, &set).unwrap();
        let rho = spectral_radius(&e).unwrap();
        let sigma = singular_values(&e).unwrap()[0];
        assert!(rho <= sigma + 1e-10 * (1.0 + sigma), "trial {trial}");
    }

    let (frame, weights) = named_example("example_5").unwrap();
    let dual = frame.canonical_dual().unwrap();
    for m in 1..=2 {
        let r = max_measure(&frame, &dual, &weights, &MeasureSpec::new(1.0, m).unwrap())
            .unwrap()
            .value;
        let o = max_measure(&frame, &dual, &weights, &MeasureSpec::new(0.0, m).unwrap())
            .unwrap()
            .value;
        for lambda in [0.25, 0.5, 0.75] {
            let a = max_measure(
                &frame,
                &dual,
                &weights,
                &MeasureSpec::new(lambda, m).unwrap(),
            )
            .unwrap()
            .value;
            assert!(
                r <= a + 1e-12 && a <= o + 1e-12,
                "m = {m}, lambda = {lambda}"
            );
        }
    }
}

#[test]
fn weights_always_sum_to_dimension() {
    let mut rng = SplitMix64::new(25);
    for _ in 0..500 {
        let n = 1 + (rng.next_u64() % 6) as usize;
        let count = (n + 1).max(2) + (rng.next_u64() % 6) as usize;
        let raw: Vec<f64> = (0..count).map(|_| 0.01 + rng.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        let p = ProbabilitySequence::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let q = weights_from_probabilities(&p, n).unwrap();
        let harmonic: f64 = q.values().iter().map(|x| 1.0 / x).sum();
        assert!((harmonic - n as f64).abs() <= 1e-10);
        assert!(q.values().iter().all(|&x| x >= 1.0));
    }
}

#[test]
fn sufficiency_theorem_matches_optimizer() {
    // Wherever the sufficiency certificate applies, the optimizer finds
    // nothing better than the canonical dual.
    let instances: Vec<(Frame, WeightSequence, f64)> = vec![
        (
            Frame::new(vec![
                Vector::real(&[1.0, 0.0]),
                Vector::real(&[0.0, 0.5]),
                Vector::real(&[0.0, 0.5]),
            ])
            .unwrap(),
            WeightSequence::relaxed(vec![1.0, 1.5, 1.5], 2).unwrap(),
            0.5,
        ),
        (
            Frame::new(vec![
                Vector::real(&[2.0, 0.0, 0.0]),
                Vector::real(&[0.0, 1.0, 0.0]),
                Vector::real(&[0.0, 0.0, 1.0]),
                Vector::real(&[0.0, 0.0, 1.0]),
            ])
            .unwrap(),
            WeightSequence::relaxed(vec![1.0, 1.0, 0.4, 0.4], 3).unwrap(),
            0.25,
        ),
    ];
    let config = OptimizationConfig::default();
    for (frame, weights, lambda) in &instances {
        let cert = certify_canonical(frame, weights, *lambda).unwrap();
        assert!(
            cert.canonical_optimal_sufficient.applies,
            "instance should satisfy the sufficiency hypotheses"
        );
        let run = optimize_dual(frame, weights, *lambda, &config).unwrap();
        assert!(
            run.canonical_value - run.best_value <= OPTIMALITY_DETECTION_TOL,
            "certificate and optimizer disagree: canonical {} vs best {}",
            run.canonical_value,
            run.best_value
        );
    }
}

#[test]
fn optimal_pairs_attain_the_floor() {
    // pair_optimality = Optimal forces the max measure to equal 1.
    let mut rng = SplitMix64::new(26);
    for trial in 0..20 {
        let n = 2 + (trial % 2);
        let count = n + 1 + (trial % 3);
        let raw: Vec<f64> = (0..count).map(|_| 0.05 + rng.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        let p = ProbabilitySequence::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let weights = weights_from_probabilities(&p, n).unwrap();
        let frame = optidual::construct::prob_equal_norm_parseval(&weights)
            .unwrap()
            .frame;
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0, rng.next_f64()] {
            assert_eq!(
                pair_optimality(&frame, &frame, &weights, lambda).unwrap(),
                PairVerdict::Optimal
            );
            let value = max_measure(
                &frame,
                &frame,
                &weights,
                &MeasureSpec::new(lambda, 1).unwrap(),
            )
            .unwrap()
            .value;
            assert!((value - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn optimal_value_is_unitarily_equivariant() {
    let (frame, weights) = named_example("example_5").unwrap();
    let config = OptimizationConfig::default();
    let base = optimize_dual(&frame, &weights, 1.0, &config).unwrap();
    for seed in 100..105u64 {
        let u = random_unitary(2, seed).unwrap();
        let uf = frame.apply_unitary(&u).unwrap();
        let run = optimize_dual(&uf, &weights, 1.0, &config).unwrap();
        assert!((run.best_value - base.best_value).abs() <= 1e-9);
        // The unitary image of the found optimum is optimal for UF.
        let moved = base.best_dual.apply_unitary(&u).unwrap();
        let spec = MeasureSpec::new(1.0, 1).unwrap();
        let value = max_measure(&uf, &moved, &weights, &spec).unwrap().value;
        assert!((value - run.best_value).abs() <= 1e-9);
    }
}

#[test]
fn simulator_errors_below_operator_norm() {
    use optidual::sim::{run_simulation, SignalModel, SimConfig};
    let mut rng = SplitMix64::new(27);
    for trial in 0..5 {
        let n = 2 + (trial % 2);
        let count = n + 2;
        let frame = random_frame(n, count, rng.next_u64()).unwrap();
        let dual = random_dual(&frame, rng.next_u64(), 0.4).unwrap();
        let raw: Vec<f64> = (0..count).map(|_| 0.05 + rng.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        let p = ProbabilitySequence::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let weights = weights_from_probabilities(&p, n).unwrap();
        let config = SimConfig::new(5_000, rng.next_u64(), SignalModel::RandomUnit).unwrap();
        let report = run_simulation(&frame, &dual, &p, &weights, &config).unwrap();
        let ceiling = max_measure(&frame, &dual, &weights, &MeasureSpec::new(0.0, 1).unwrap())
            .unwrap()
            .value;
        assert!(report.max_error <= ceiling + 1e-9, "trial {trial}");
    }
}
