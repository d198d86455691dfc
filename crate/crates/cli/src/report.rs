//! Output shaping: significant-digit formatting for the text tables and
//! the serde mirror types for `--json` documents. JSON floats go through
//! serde_json's shortest round-trip encoding, so every value re-parses
//! bit-exactly; indices are reported 1-based to match the usual tables.

use optidual::erasure::{MeasureReport, WeightSequence};
use optidual::frame::{Frame, FrameBounds};
use optidual::numerics::{Complex64, Matrix};
use optidual::optimal::{
    Conclusion, CrossMeasureReport, OptimalityCertificate, OptimizationResult, TheoremVerdict,
};
use optidual::sim::SimReport;
use serde::Serialize;

/// `x` rounded to `sig` significant digits, plain decimal where readable.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mut exp = x.abs().log10().floor() as i32;
    // Rounding at this many significant places can carry into the next
    // decade (0.9999995 at 6 digits prints as 1.00000).
    if (x.abs() * 10f64.powi(digits as i32 - 1 - exp)).round() >= 10f64.powi(digits as i32) {
        exp += 1;
    }
    if (-4..digits as i32).contains(&exp) {
        let places = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.places$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

pub fn sig6(x: f64) -> String {
    sig(x, 6)
}

pub fn complex_str(z: Complex64) -> String {
    if z.im == 0.0 {
        sig6(z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", sig6(z.re), sig6(z.im))
    } else {
        format!("{}+{}i", sig6(z.re), sig6(z.im))
    }
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&i| i + 1).collect()
}

#[derive(Serialize)]
pub struct FrameJson {
    pub dim: usize,
    pub count: usize,
    /// Vectors as rows of [re, im] pairs.
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl FrameJson {
    pub fn new(frame: &Frame) -> Self {
        FrameJson {
            dim: frame.dim(),
            count: frame.len(),
            vectors: frame
                .vectors()
                .iter()
                .map(|v| v.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn new(m: &Matrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| [m.get(i, j).re, m.get(i, j).im])
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct BoundsJson {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    pub parseval: bool,
}

impl From<FrameBounds> for BoundsJson {
    fn from(b: FrameBounds) -> Self {
        BoundsJson {
            lower: b.lower,
            upper: b.upper,
            tight: b.tight,
            parseval: b.parseval,
        }
    }
}

#[derive(Serialize)]
pub struct MeasureJson {
    pub lambda: f64,
    pub erasures: usize,
    pub value: f64,
    /// 1-based indices of the worst erasure set.
    pub argmax: Vec<usize>,
    pub per_location: Vec<PerLocationJson>,
}

#[derive(Serialize)]
pub struct PerLocationJson {
    pub set: Vec<usize>,
    pub value: f64,
}

impl MeasureJson {
    pub fn new(lambda: f64, erasures: usize, report: &MeasureReport) -> Self {
        MeasureJson {
            lambda,
            erasures,
            value: report.value,
            argmax: one_based(report.argmax.indices()),
            per_location: report
                .per_location
                .iter()
                .map(|(set, value)| PerLocationJson {
                    set: one_based(set.indices()),
                    value: *value,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct WeightsJson {
    pub mode: String,
    pub values: Vec<f64>,
}

impl WeightsJson {
    pub fn new(q: &WeightSequence) -> Self {
        WeightsJson {
            mode: if q.is_strict() { "strict" } else { "relaxed" }.to_string(),
            values: q.values().to_vec(),
        }
    }
}

#[derive(Serialize)]
pub struct AnalyzeJson {
    pub frame: FrameJson,
    pub weights: WeightsJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    pub bounds: BoundsJson,
    pub frame_operator: MatrixJson,
    pub canonical_dual: FrameJson,
    pub measures: Vec<MeasureJson>,
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub applies: bool,
    pub conclusion: String,
}

impl From<TheoremVerdict> for VerdictJson {
    fn from(v: TheoremVerdict) -> Self {
        let conclusion = match v.conclusion {
            Conclusion::Inconclusive => "inconclusive",
            Conclusion::CanonicalOptimal => "canonical_optimal",
            Conclusion::UniquelyCanonical => "uniquely_canonical",
            Conclusion::CanonicalOptimalUncountable => "canonical_optimal_uncountable",
            Conclusion::NotUniquelyCanonical => "not_uniquely_canonical",
        };
        VerdictJson {
            applies: v.applies,
            conclusion: conclusion.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct CertificateJson {
    pub lambda: f64,
    pub weight_mode: String,
    pub l_lambda: f64,
    pub lambda1: Vec<usize>,
    pub lambda2: Vec<usize>,
    pub h_intersection_trivial: bool,
    pub lambda1_independent: bool,
    pub m_value: f64,
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
    pub e_intersection_trivial: bool,
    pub gamma2_independent: bool,
    pub tight: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal_weighted_norms: Option<f64>,
    pub delta_nonempty_established: bool,
    pub canonical_optimal_sufficient: VerdictJson,
    pub unique_if_tight_equal_norms: VerdictJson,
    pub canonical_optimal_if_e_trivial: VerdictJson,
    pub uniqueness_iff: VerdictJson,
}

impl CertificateJson {
    pub fn new(c: &OptimalityCertificate) -> Self {
        CertificateJson {
            lambda: c.lambda,
            weight_mode: match c.weight_mode {
                optidual::erasure::WeightMode::Strict => "strict".to_string(),
                optidual::erasure::WeightMode::Relaxed => "relaxed".to_string(),
            },
            l_lambda: c.l_lambda,
            lambda1: one_based(&c.lambda1),
            lambda2: one_based(&c.lambda2),
            h_intersection_trivial: c.h_intersection_trivial,
            lambda1_independent: c.lambda1_independent,
            m_value: c.m_value,
            gamma1: one_based(&c.gamma1),
            gamma2: one_based(&c.gamma2),
            e_intersection_trivial: c.e_intersection_trivial,
            gamma2_independent: c.gamma2_independent,
            tight: c.tight,
            equal_weighted_norms: c.equal_weighted_norms,
            delta_nonempty_established: c.delta_nonempty_established,
            canonical_optimal_sufficient: c.canonical_optimal_sufficient.into(),
            unique_if_tight_equal_norms: c.unique_if_tight_equal_norms.into(),
            canonical_optimal_if_e_trivial: c.canonical_optimal_if_e_trivial.into(),
            uniqueness_iff: c.uniqueness_iff.into(),
        }
    }
}

#[derive(Serialize)]
pub struct OptimizeRunJson {
    pub lambda: f64,
    pub best_value: f64,
    pub canonical_value: f64,
    pub improved_over_canonical: bool,
    pub iterations_traced: usize,
    pub best_dual: FrameJson,
    pub certificate: CertificateJson,
}

impl OptimizeRunJson {
    pub fn new(lambda: f64, run: &OptimizationResult, cert: &OptimalityCertificate) -> Self {
        OptimizeRunJson {
            lambda,
            best_value: run.best_value,
            canonical_value: run.canonical_value,
            improved_over_canonical: run.improved_over_canonical,
            iterations_traced: run.value_trace.len(),
            best_dual: FrameJson::new(&run.best_dual),
            certificate: CertificateJson::new(cert),
        }
    }
}

#[derive(Serialize)]
pub struct OptimizeJson {
    pub frame: FrameJson,
    pub weights: WeightsJson,
    pub runs: Vec<OptimizeRunJson>,
}

#[derive(Serialize)]
pub struct ConstructJson {
    pub weights: WeightsJson,
    pub parseval_residual: f64,
    pub norm_residual: f64,
    pub frame: FrameJson,
}

#[derive(Serialize)]
pub struct SimulateJson {
    pub trials: usize,
    pub seed: u64,
    pub location_counts: Vec<u64>,
    pub mean_error: f64,
    pub max_error: f64,
    pub per_location_mean: Vec<f64>,
    pub analytic_ceiling: f64,
}

impl SimulateJson {
    pub fn new(trials: usize, seed: u64, report: &SimReport, ceiling: f64) -> Self {
        SimulateJson {
            trials,
            seed,
            location_counts: report.location_counts.clone(),
            mean_error: report.mean_error,
            max_error: report.max_error,
            per_location_mean: report.per_location_mean.clone(),
            analytic_ceiling: ceiling,
        }
    }
}

#[derive(Serialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub passed: bool,
    pub checks: Vec<CheckJson>,
}

#[derive(Serialize)]
pub struct CrossMeasureJson {
    pub lambda: f64,
    pub operator_norm_optimal: bool,
    pub spectral_radius_optimal: bool,
    pub averaged_optimal: bool,
    pub tight: bool,
    pub in_theorem_scope: bool,
}

impl From<CrossMeasureReport> for CrossMeasureJson {
    fn from(r: CrossMeasureReport) -> Self {
        CrossMeasureJson {
            lambda: r.lambda,
            operator_norm_optimal: r.operator_norm_optimal,
            spectral_radius_optimal: r.spectral_radius_optimal,
            averaged_optimal: r.averaged_optimal,
            tight: r.tight,
            in_theorem_scope: r.in_theorem_scope,
        }
    }
}
