//! Seeded Monte-Carlo simulation of coefficient transmission with one
//! probabilistically-drawn erasure location per trial.
//!
//! Each trial samples a location i from the probability sequence, draws a
//! signal f, and records the weighted reconstruction defect
//! ||q_i <f, f_i> g_i|| / ||f||, the realized action of the rank-one error
//! operator. Per-trial generators are derived by counter-based splitting,
//! so reports are bit-identical for identical inputs and seed.

use crate::erasure::{max_of, weights_from_probabilities, ProbabilitySequence, WeightSequence};
use crate::error::{Error, Result};
use crate::frame::{dual_residual, Frame};
use crate::numerics::{Complex64, Vector};
use crate::rng::SplitMix64;

/// Signal model for the simulated transmissions.
#[derive(Debug, Clone)]
pub enum SignalModel {
    /// Uniform on the unit sphere via normalized Gaussian draws.
    RandomUnit,
    /// A fixed signal vector, re-used in every trial.
    Fixed(Vector),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub trials: usize,
    pub seed: u64,
    pub signal_model: SignalModel,
}

impl SimConfig {
    pub fn new(trials: usize, seed: u64, signal_model: SignalModel) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Validation("trials must be >= 1".into()));
        }
        Ok(SimConfig {
            trials,
            seed,
            signal_model,
        })
    }
}

/// Aggregated simulation statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    /// How often each location was erased; sums to the trial count.
    pub location_counts: Vec<u64>,
    pub mean_error: f64,
    pub max_error: f64,
    /// Mean error conditioned on each location (zero for unseen locations).
    pub per_location_mean: Vec<f64>,
}

/// Runs the transmission simulation for a verified dual pair. The weight
/// sequence must match the probabilities through the defining formula
/// within 1e-9.
pub fn run_simulation(
    frame: &Frame,
    dual: &Frame,
    probabilities: &ProbabilitySequence,
    weights: &WeightSequence,
    config: &SimConfig,
) -> Result<SimReport> {
    let residual = dual_residual(frame, dual)?;
    if residual > 1e-9 {
        return Err(Error::NotADualPair { residual });
    }
    let count = frame.len();
    let dim = frame.dim();
    if probabilities.len() != count || weights.len() != count {
        return Err(Error::ShapeMismatch(format!(
            "need {count} probabilities and weights"
        )));
    }
    let derived = weights_from_probabilities(probabilities, dim)?;
    let mismatch = derived
        .values()
        .iter()
        .zip(weights.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if mismatch > 1e-9 {
        return Err(Error::InvalidWeights(format!(
            "weights disagree with the probability sequence by {mismatch:e}"
        )));
    }
    if let SignalModel::Fixed(f) = &config.signal_model {
        if f.dim() != dim {
            return Err(Error::ShapeMismatch(format!(
                "fixed signal must have dimension {dim}"
            )));
        }
        if f.norm() == 0.0 {
            return Err(Error::Validation("fixed signal must be nonzero".into()));
        }
    }

    // Inverse-CDF table for the erasure location.
    let mut cdf = Vec::with_capacity(count);
    let mut acc = 0.0;
    for &p in probabilities.values() {
        acc += p;
        cdf.push(acc);
    }

    let base = SplitMix64::new(config.seed);
    let mut location_counts = vec![0u64; count];
    let mut per_location_sum = vec![0.0f64; count];
    let mut per_location_comp = vec![0.0f64; count];
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut max_error = 0.0f64;

    for trial in 0..config.trials {
        let mut rng = base.split(trial as u64);
        let u = rng.next_f64();
        let location = cdf.partition_point(|&c| c <= u).min(count - 1);

        let signal = match &config.signal_model {
            SignalModel::Fixed(f) => f.clone(),
            SignalModel::RandomUnit => loop {
                let draw = Vector::new((0..dim).map(|_| rng.next_complex_gaussian()).collect())
                    .expect("gaussian entries are finite");
                let norm = draw.norm();
                if norm > 1e-12 {
                    break draw.scale(Complex64::new(1.0 / norm, 0.0));
                }
            },
        };

        let coefficient = signal.inner(frame.vector(location));
        let defect = dual
            .vector(location)
            .scale(coefficient.scale(weights.get(location)));
        let error = defect.norm() / signal.norm();

        location_counts[location] += 1;
        max_error = max_error.max(error);
        // Compensated sums keep the means order-insensitive.
        kahan_add(&mut sum, &mut comp, error);
        kahan_add(
            &mut per_location_sum[location],
            &mut per_location_comp[location],
            error,
        );
    }

    let per_location_mean = per_location_sum
        .iter()
        .zip(&location_counts)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect();
    Ok(SimReport {
        location_counts,
        mean_error: sum / config.trials as f64,
        max_error,
        per_location_mean,
    })
}

fn kahan_add(sum: &mut f64, compensation: &mut f64, value: f64) {
    let y = value - *compensation;
    let t = *sum + y;
    *compensation = (t - *sum) - y;
    *sum = t;
}

/// Largest single-erasure operator norm; every realized trial error is
/// bounded by it.
pub fn analytic_error_ceiling(frame: &Frame, dual: &Frame, weights: &WeightSequence) -> f64 {
    let per_index: Vec<f64> = (0..frame.len())
        .map(|i| weights.get(i) * frame.vector(i).norm() * dual.vector(i).norm())
        .collect();
    max_of(&per_index)
}
