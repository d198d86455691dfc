use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Validation-style failures (bad shapes, violated invariants) are kept
/// separate from numeric failures (iteration caps) so callers can map them
/// to different exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M^H| = {deviation:e} exceeds tol {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("{algorithm} did not converge within {iterations} iterations")]
    NoConvergence {
        algorithm: &'static str,
        iterations: usize,
    },

    #[error("matrix is not positive definite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("not a frame: smallest frame-operator eigenvalue {min_eigenvalue:e} is below the rank threshold")]
    NotAFrame { min_eigenvalue: f64 },

    #[error("operator is not unitary: max |U^H U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("input vectors are numerically dependent (rank {rank} < {count})")]
    DependentInput { rank: usize, count: usize },

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("frames do not form a dual pair: max |sum g_i f_i^H - I| = {residual:e}")]
    NotADualPair { residual: f64 },

    #[error("wrong weight mode: {operation} requires {required} weights")]
    WrongWeightMode {
        operation: &'static str,
        required: &'static str,
    },

    #[error("erasure set is invalid: {0}")]
    InvalidErasureSet(String),

    #[error("{subsets} erasure patterns exceed the enumeration cap of {cap}")]
    TooManySubsets { subsets: usize, cap: usize },

    #[error("theorem hypotheses fail: {0}")]
    HypothesesFail(String),

    #[error("prerequisite not met: {0}")]
    PrerequisiteNotMet(String),

    #[error("majorization check failed: {0}")]
    MajorizationFail(String),

    #[error("could not draw a spanning frame after {attempts} attempts")]
    RankFail { attempts: usize },

    #[error("unknown example id {0:?}")]
    UnknownId(String),

    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of iterative numeric procedures, as opposed to
    /// rejected inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
