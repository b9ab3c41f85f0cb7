//! Register states, marked sets and the partition statistics that every
//! engine consumes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, ComplexSum};

/// Tolerance on Σ|a_i|² when a state is built from user input.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-8;
/// Tolerance on Σp_μ when an ensemble is built.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;
/// Largest supported register width.
pub const MAX_QUBITS: u32 = 30;

pub(crate) fn dimension(n: u32) -> Result<usize> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok(1usize << n)
}

/// A normalized pure state of an `n`-qubit register.
///
/// Amplitudes are stored exactly as supplied; construction validates but never
/// renormalizes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = dimension(n)?;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                n,
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm_sqr: CompensatedSum = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let norm_sqr = norm_sqr.value();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > INPUT_NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm_sqr,
                tolerance: INPUT_NORM_TOLERANCE,
            });
        }
        Ok(Self { n, amplitudes })
    }

    /// The equal superposition η: every amplitude is 1/√N.
    pub fn uniform(n: u32) -> Result<Self> {
        let n_total = dimension(n)?;
        let a = Complex64::new(1.0 / (n_total as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            amplitudes: vec![a; n_total],
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis(n: u32, index: usize) -> Result<Self> {
        let n_total = dimension(n)?;
        if index >= n_total {
            return Err(Error::IndexOutOfRange { index, n_total });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_total];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    /// Wraps amplitudes produced by a norm-preserving evolution.
    pub(crate) fn from_evolved(n: u32, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n);
        Self { n, amplitudes }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Dimension N = 2^n.
    pub fn n_total(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        let s: CompensatedSum = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        s.value()
    }

    /// Mean amplitude ā = (1/N) Σ a_i.
    pub fn global_mean(&self) -> Complex64 {
        let s: ComplexSum = self.amplitudes.iter().copied().collect();
        s.value() / self.n_total() as f64
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        let s: ComplexSum = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .collect();
        s.value()
    }

    pub fn is_real(&self, tolerance: f64) -> bool {
        self.amplitudes.iter().all(|a| a.im.abs() <= tolerance)
    }

    pub(crate) fn check_dimension(&self, n: u32) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.n,
            });
        }
        Ok(())
    }
}

pub fn uniform_state(n: u32) -> Result<PureState> {
    PureState::uniform(n)
}

pub fn global_mean(state: &PureState) -> Complex64 {
    state.global_mean()
}

/// The set 𝓜 of marked basis indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedSet {
    n: u32,
    indices: Vec<usize>,
}

impl MarkedSet {
    pub fn new(n: u32, mut indices: Vec<usize>) -> Result<Self> {
        let n_total = dimension(n)?;
        if indices.is_empty() {
            return Err(Error::EmptyMarkedSet);
        }
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&index) = indices.last().filter(|&&i| i >= n_total) {
            return Err(Error::IndexOutOfRange { index, n_total });
        }
        Ok(Self { n, indices })
    }

    /// Every basis index marked.
    pub fn all(n: u32) -> Result<Self> {
        let n_total = dimension(n)?;
        Ok(Self {
            n,
            indices: (0..n_total).collect(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_total(&self) -> usize {
        1usize << self.n
    }

    /// Number of marked states r.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.n_total()
    }

    /// Unmarked indices 𝓤 in increasing order.
    pub fn unmarked(&self) -> impl Iterator<Item = usize> + Clone + '_ {
        let mut next_marked = self.indices.iter().copied().peekable();
        (0..self.n_total()).filter(move |&i| {
            if next_marked.peek() == Some(&i) {
                next_marked.next();
                false
            } else {
                true
            }
        })
    }

    /// Indicator vector over the full basis.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_total()];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }
}

/// P₀ and the mean amplitudes of a state with respect to a marked set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionStats {
    /// Σ_{m∈𝓜} |a_m|²
    pub p0: f64,
    pub abar_m: Complex64,
    /// Defined as 0 when every index is marked.
    pub abar_u: Complex64,
    pub abar: Complex64,
    pub r: usize,
    pub n_total: usize,
}

impl PartitionStats {
    /// 𝓤 is empty; formulas with 1/(N−r) take their degenerate branch.
    pub fn is_fully_marked(&self) -> bool {
        self.r == self.n_total
    }

    /// Builds the statistics from precomputed partial sums.
    pub(crate) fn from_sums(
        p0: f64,
        marked_sum: Complex64,
        unmarked_sum: Complex64,
        total_sum: Complex64,
        r: usize,
        n_total: usize,
    ) -> Self {
        let abar_u = if r == n_total {
            Complex64::new(0.0, 0.0)
        } else {
            unmarked_sum / (n_total - r) as f64
        };
        Self {
            p0,
            abar_m: marked_sum / r as f64,
            abar_u,
            abar: total_sum / n_total as f64,
            r,
            n_total,
        }
    }
}

/// Direct summation of P₀, ā_M, ā_U and ā.
pub fn partition_stats(state: &PureState, marked: &MarkedSet) -> Result<PartitionStats> {
    state.check_dimension(marked.n())?;
    let a = state.amplitudes();
    let mut p0 = CompensatedSum::new();
    let mut marked_sum = ComplexSum::new();
    for &m in marked.indices() {
        p0.add(a[m].norm_sqr());
        marked_sum.add(a[m]);
    }
    let unmarked_sum: ComplexSum = marked.unmarked().map(|u| a[u]).collect();
    let total_sum: ComplexSum = a.iter().copied().collect();
    Ok(PartitionStats::from_sums(
        p0.value(),
        marked_sum.value(),
        unmarked_sum.value(),
        total_sum.value(),
        marked.len(),
        state.n_total(),
    ))
}

/// A probability-weighted list of pure states realizing ρ₀ = Σ p_μ |ψ_μ⟩⟨ψ_μ|.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEnsemble {
    n: u32,
    members: Vec<(f64, PureState)>,
}

impl MixedEnsemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let n = members.first().ok_or(Error::EmptyEnsemble)?.1.n();
        for (index, (weight, state)) in members.iter().enumerate() {
            if !weight.is_finite() || *weight <= 0.0 {
                return Err(Error::InvalidWeight {
                    index,
                    weight: *weight,
                });
            }
            state.check_dimension(n)?;
        }
        let sum: CompensatedSum = members.iter().map(|(p, _)| *p).collect();
        let sum = sum.value();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Self { n, members })
    }

    /// Members already validated by the caller.
    pub(crate) fn from_parts(n: u32, members: Vec<(f64, PureState)>) -> Self {
        Self { n, members }
    }

    pub fn pure(state: PureState) -> Self {
        Self {
            n: state.n(),
            members: vec![(1.0, state)],
        }
    }

    /// I/N realized as the N computational basis states with weight 1/N.
    pub fn maximally_mixed(n: u32) -> Result<Self> {
        let n_total = dimension(n)?;
        let p = 1.0 / n_total as f64;
        let members = (0..n_total)
            .map(|i| PureState::basis(n, i).map(|s| (p, s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, members })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_total(&self) -> usize {
        1usize << self.n
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// |ā|²_mix = Σ p_μ |ā_μ|².
    pub fn mean_abs_abar_sqr(&self) -> f64 {
        let s: CompensatedSum = self
            .members
            .iter()
            .map(|(p, s)| p * s.global_mean().norm_sqr())
            .collect();
        s.value()
    }
}
