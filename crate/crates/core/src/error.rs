use thiserror::Error;

/// Errors raised by the engines and by state/ensemble validation.
///
/// Every message starts with the variant name so command-line users can match
/// on it directly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidQubitCount: {0} qubits is outside the supported range 1..=30")]
    InvalidQubitCount(u32),
    #[error("LengthMismatch: {n} qubits need {expected} amplitudes, got {actual}")]
    LengthMismatch {
        n: u32,
        expected: usize,
        actual: usize,
    },
    #[error("NotNormalized: squared norm {norm_sqr} deviates from 1 by more than {tolerance:e}")]
    NotNormalized { norm_sqr: f64, tolerance: f64 },
    #[error("DimensionMismatch: expected {expected} qubits, got {actual}")]
    DimensionMismatch { expected: u32, actual: u32 },
    #[error("IndexOutOfRange: index {index} is not below {n_total}")]
    IndexOutOfRange { index: usize, n_total: usize },
    #[error("DuplicateIndex: index {0} appears more than once in the marked set")]
    DuplicateIndex(usize),
    #[error("EmptyMarkedSet: at least one index must be marked")]
    EmptyMarkedSet,
    #[error("InvalidCount: r = {r} is outside 1..={n_total}")]
    InvalidCount { r: usize, n_total: usize },
    #[error("InvalidSamples: Monte Carlo needs at least 2 samples, got {0}")]
    InvalidSamples(usize),
    #[error("FullyMarked: every basis state is marked, the unmarked subspace is empty")]
    FullyMarked,
    #[error("FrameMismatch: {0}")]
    FrameMismatch(String),
    #[error("InconsistentStats: bound {bound} lies outside [0, 1]")]
    InconsistentStats { bound: f64 },
    #[error("ComplexAmplitudes: amplitude {index} has imaginary part {imag:e}")]
    ComplexAmplitudes { index: usize, imag: f64 },
    #[error("InvalidEpsilon: {0} is outside [0, 1]")]
    InvalidEpsilon(f64),
    #[error("InvalidWeight: member {index} has weight {weight}, weights must be positive")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("WeightsNotNormalized: ensemble weights sum to {sum}")]
    WeightsNotNormalized { sum: f64 },
    #[error("EmptyEnsemble: an ensemble needs at least one member")]
    EmptyEnsemble,
    #[error("BudgetExceeded: {subsets} subsets exceeds the enumeration budget of {budget}")]
    BudgetExceeded { subsets: String, budget: u64 },
    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
