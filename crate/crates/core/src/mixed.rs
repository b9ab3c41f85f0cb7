//! Mixed initial states, pseudo-pure states and search on part of a shared
//! register.
//!
//! Mixed states are kept as ensembles {(p_μ, ψ_μ)}. Every quantity here is
//! linear in ρ₀, so no N×N density matrix is ever formed.

use num_complex::Complex64;

use crate::averaging::closed_average;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::{clamp_unit, CompensatedSum, ComplexSum};
use crate::state::{dimension, MarkedSet, MixedEnsemble, PureState, INPUT_NORM_TOLERANCE};
use crate::statevector::{evolve_with, success_probability};

/// Bob-side members with |c_μ|² below this are dropped by [`bipartite_reduce`].
pub const MEMBER_DROP_THRESHOLD: f64 = 1e-14;
/// Tolerance for the equality case of the partial-search inequality.
pub const EQUALITY_TOLERANCE: f64 = 1e-10;

/// ρ(t) = Q^t ρ₀ Q^t†, evolved member by member.
pub fn evolve_ensemble(ens: &MixedEnsemble, marked: &MarkedSet, t: u64) -> Result<MixedEnsemble> {
    evolve_ensemble_with(Exec::default(), ens, marked, t)
}

pub fn evolve_ensemble_with(
    exec: Exec,
    ens: &MixedEnsemble,
    marked: &MarkedSet,
    t: u64,
) -> Result<MixedEnsemble> {
    if ens.n() != marked.n() {
        return Err(Error::DimensionMismatch {
            expected: marked.n(),
            actual: ens.n(),
        });
    }
    let members = ens
        .members()
        .iter()
        .map(|(p, s)| Ok((*p, evolve_with(exec, s, marked, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedEnsemble::from_parts(ens.n(), members))
}

/// Σ_μ p_μ P_s(ψ_μ, t), each term from the state-vector engine.
pub fn success_probability_mixed(ens: &MixedEnsemble, marked: &MarkedSet, t: u64) -> Result<f64> {
    let evolved = evolve_ensemble(ens, marked, t)?;
    let mut total = CompensatedSum::new();
    for (p, s) in evolved.members() {
        total.add(p * success_probability(s, marked)?);
    }
    Ok(clamp_unit(total.value()))
}

/// N|ā|² sin²[ω(t + ½)] + (r/N)(1 − N|ā|²) with |ā|² = Σ p_μ |ā_μ|².
pub fn average_success_mixed_closed(ens: &MixedEnsemble, r: usize, t: u64) -> Result<f64> {
    let n_total = ens.n_total();
    if r == 0 || r > n_total {
        return Err(Error::InvalidCount { r, n_total });
    }
    closed_average(n_total, r, ens.mean_abs_abar_sqr(), t)
}

/// ⟨η|ρ₀|η⟩ = Σ_μ p_μ |⟨η|ψ_μ⟩|².
pub fn max_success_fidelity(ens: &MixedEnsemble) -> f64 {
    let eta = PureState::uniform(ens.n()).expect("ensemble width already validated");
    let total: CompensatedSum = ens
        .members()
        .iter()
        .map(|(p, s)| p * eta.inner(s).norm_sqr())
        .collect();
    total.value()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(())
}

/// P_max of ρ_ε = (1−ε) I/N + ε|ψ⟩⟨ψ|: (1−ε)/N + εN|ā_ψ|².
pub fn pseudo_pure_max(epsilon: f64, psi: &PureState) -> Result<f64> {
    check_epsilon(epsilon)?;
    let n = psi.n_total() as f64;
    Ok((1.0 - epsilon) / n + epsilon * n * psi.global_mean().norm_sqr())
}

/// ρ_ε realized as N basis states with weight (1−ε)/N plus ψ with weight ε.
/// Zero-weight members are omitted.
pub fn pseudo_pure_ensemble(epsilon: f64, psi: &PureState) -> Result<MixedEnsemble> {
    check_epsilon(epsilon)?;
    let n_total = psi.n_total();
    let mut members = Vec::with_capacity(n_total + 1);
    let background = (1.0 - epsilon) / n_total as f64;
    if background > 0.0 {
        for i in 0..n_total {
            members.push((background, PureState::basis(psi.n(), i)?));
        }
    }
    if epsilon > 0.0 {
        members.push((epsilon, psi.clone()));
    }
    MixedEnsemble::new(members)
}

/// A pure state of n_alice + k_bob qubits, amplitudes b_{μi} stored Bob-major
/// (index μ·N + i).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    n_alice: u32,
    k_bob: u32,
    amplitudes: Vec<Complex64>,
}

impl BipartiteState {
    pub fn new(n_alice: u32, k_bob: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_total = dimension(n_alice)?;
        let k_total = if k_bob == 0 { 1 } else { dimension(k_bob)? };
        if n_alice + k_bob > crate::state::MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n_alice + k_bob));
        }
        let expected = n_total * k_total;
        if amplitudes.len() != expected {
            return Err(Error::LengthMismatch {
                n: n_alice + k_bob,
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm: CompensatedSum = amplitudes.iter().map(|b| b.norm_sqr()).collect();
        let norm_sqr = norm.value();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > INPUT_NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm_sqr,
                tolerance: INPUT_NORM_TOLERANCE,
            });
        }
        Ok(Self {
            n_alice,
            k_bob,
            amplitudes,
        })
    }

    /// |ψ_A⟩ ⊗ |ψ_B⟩ in Bob-major order.
    pub fn product(alice: &PureState, bob: &PureState) -> Result<Self> {
        let amplitudes = bob
            .amplitudes()
            .iter()
            .flat_map(|b| alice.amplitudes().iter().map(move |a| a * b))
            .collect();
        Self::new(alice.n(), bob.n(), amplitudes)
    }

    pub fn n_alice(&self) -> u32 {
        self.n_alice
    }

    pub fn k_bob(&self) -> u32 {
        self.k_bob
    }

    /// N = 2^n_alice.
    pub fn alice_dim(&self) -> usize {
        1usize << self.n_alice
    }

    /// K = 2^k_bob.
    pub fn bob_dim(&self) -> usize {
        1usize << self.k_bob
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Row μ: the unnormalized Alice amplitudes b_{μ·}.
    pub fn bob_row(&self, mu: usize) -> &[Complex64] {
        let n = self.alice_dim();
        &self.amplitudes[mu * n..(mu + 1) * n]
    }

    /// The whole register viewed as one (n+k)-qubit state, Bob index high.
    pub fn joint_state(&self) -> PureState {
        PureState::from_evolved(self.n_alice + self.k_bob, self.amplitudes.clone())
    }

    /// x_μ = c_μ ā_μ = (1/N) Σ_i b_{μi}, independent of the phase of c_μ.
    pub fn weighted_means(&self) -> Vec<Complex64> {
        let n = self.alice_dim() as f64;
        (0..self.bob_dim())
            .map(|mu| {
                let s: ComplexSum = self.bob_row(mu).iter().copied().collect();
                s.value() / n
            })
            .collect()
    }
}

/// ρ^A = Tr_B |ψ⟩⟨ψ| as the ensemble {(|c_μ|², b_{μ·}/c_μ)} over Bob's basis.
///
/// Members with |c_μ|² < [`MEMBER_DROP_THRESHOLD`] are dropped. Weights are
/// divided by the total Σ|c_μ|² of the input, which absorbs the input's
/// normalization slack; they are then renormalized over the kept members when
/// the dropped mass is below 1e−12.
pub fn bipartite_reduce(state: &BipartiteState) -> MixedEnsemble {
    let rows: Vec<(f64, &[Complex64])> = (0..state.bob_dim())
        .map(|mu| {
            let row = state.bob_row(mu);
            let w: CompensatedSum = row.iter().map(|b| b.norm_sqr()).collect();
            (w.value(), row)
        })
        .collect();
    let total: CompensatedSum = rows.iter().map(|(w, _)| *w).collect();
    let total = total.value();
    let kept: Vec<(f64, &[Complex64])> = rows
        .into_iter()
        .map(|(w, row)| (w / total, row))
        .filter(|(p, _)| *p >= MEMBER_DROP_THRESHOLD)
        .collect();
    let kept_mass: CompensatedSum = kept.iter().map(|(p, _)| *p).collect();
    let kept_mass = kept_mass.value();
    let scale = if 1.0 - kept_mass < 1e-12 {
        kept_mass
    } else {
        1.0
    };
    let members = kept
        .into_iter()
        .map(|(p, row)| {
            let c = (p * total).sqrt();
            let amplitudes = row.iter().map(|b| b / c).collect();
            (
                p / scale,
                PureState::from_evolved(state.n_alice(), amplitudes),
            )
        })
        .collect();
    MixedEnsemble::from_parts(state.n_alice(), members)
}

/// Leading-order maximal success of a joint search and of Alice alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSearchReport {
    /// (N/K)|Σ_μ c_μ ā_μ|², searching all n + k qubits.
    pub p_ab: f64,
    /// N Σ_μ |c_μ ā_μ|², Alice searching her reduced state.
    pub p_a: f64,
    /// p_a − p_ab, nonnegative up to rounding.
    pub gap: f64,
}

pub fn compare_partial_search(state: &BipartiteState, r: usize) -> Result<PartialSearchReport> {
    let n_total = state.alice_dim();
    if r == 0 || r > n_total {
        return Err(Error::InvalidCount { r, n_total });
    }
    let x = state.weighted_means();
    let n = n_total as f64;
    let k = state.bob_dim() as f64;
    let sum: ComplexSum = x.iter().copied().collect();
    let p_ab = n / k * sum.value().norm_sqr();
    let sq: CompensatedSum = x.iter().map(|v| v.norm_sqr()).collect();
    let p_a = n * sq.value();
    Ok(PartialSearchReport {
        p_ab,
        p_a,
        gap: p_a - p_ab,
    })
}

/// Whether p_a = p_ab holds: all c_μ ā_μ equal within [`EQUALITY_TOLERANCE`].
pub fn partial_search_equality(state: &BipartiteState) -> bool {
    let x = state.weighted_means();
    x.iter().all(|v| (v - x[0]).norm() <= EQUALITY_TOLERANCE)
}
