//! Success probability averaged over the unknown choice of the r marked
//! states: exact enumeration, Monte Carlo estimation and closed forms.
//!
//! Enumeration walks r-subsets in lexicographic order in fixed blocks of
//! ranks; Monte Carlo draws sample j from its own ChaCha stream `(seed, j)`.
//! Both reduce in a fixed order, so results do not depend on the number of
//! worker threads.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebraic::{rotation_angle, success_probability_closed};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::{clamp_unit, shifted_mean_std, CompensatedSum, ComplexSum};
use crate::state::{PartitionStats, PureState};

/// Largest number of subsets an exact average may enumerate.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

const RANK_BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMethod {
    Enumeration,
    MonteCarlo,
    ClosedForm,
}

impl AverageMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AverageMethod::Enumeration => "enumeration",
            AverageMethod::MonteCarlo => "monte_carlo",
            AverageMethod::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageEstimate {
    pub value: f64,
    /// Zero for exact methods.
    pub std_error: f64,
    pub samples: u64,
    pub method: AverageMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    Enumeration,
    ClosedForm,
}

/// Averages over marked sets of P₀ and the second moments of ā_M, ā_U.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAverages {
    pub mean_p0: f64,
    pub mean_abs_abar_u_sq: f64,
    pub mean_abs_abar_m_sq: f64,
    /// ⟨ā_U* ā_M⟩
    pub mean_cross: Complex64,
    pub r: usize,
    pub n_total: usize,
}

impl MomentAverages {
    /// ⟨ā_M ā_U*⟩, the conjugate of [`Self::mean_cross`].
    pub fn mean_cross_conj(&self) -> Complex64 {
        self.mean_cross.conj()
    }

    /// ⟨P_s(t)⟩ by substituting these averages into the closed-form P_s(t),
    /// which is linear in them.
    pub fn success_probability(&self, t: u64) -> Result<f64> {
        let omega = rotation_angle(self.n_total, self.r)?;
        let r = self.r as f64;
        let u = (self.n_total - self.r) as f64;
        let d = u * self.mean_abs_abar_u_sq - r * self.mean_abs_abar_m_sq;
        let cross = self.mean_cross + self.mean_cross_conj();
        let (sin2, cos2) = (2.0 * omega * t as f64).sin_cos();
        Ok(self.mean_p0 + 0.5 * d - 0.5 * d * cos2 + 0.5 * (r * u).sqrt() * cross.re * sin2)
    }
}

/// C(n, k), or `None` if it does not fit in a u64.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Advances `combo` (strictly increasing, values below `n`) to its
/// lexicographic successor; returns false after the last combination.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..k {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

/// The combination with lexicographic rank `rank` among k-subsets of 0..n.
pub fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            // Number of combinations that start with `next` in this slot.
            let count = binomial((n - next - 1) as u64, remaining as u64).unwrap_or(u64::MAX);
            if rank < count {
                break;
            }
            rank -= count;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Partition statistics for many marked subsets of one state, in O(r) each.
struct SubsetEvaluator<'a> {
    amplitudes: &'a [Complex64],
    total_sum: Complex64,
    n_total: usize,
}

impl<'a> SubsetEvaluator<'a> {
    fn new(state: &'a PureState) -> Self {
        let total: ComplexSum = state.amplitudes().iter().copied().collect();
        Self {
            amplitudes: state.amplitudes(),
            total_sum: total.value(),
            n_total: state.n_total(),
        }
    }

    fn stats(&self, subset: &[usize]) -> PartitionStats {
        let mut p0 = CompensatedSum::new();
        let mut marked = ComplexSum::new();
        for &m in subset {
            let a = self.amplitudes[m];
            p0.add(a.norm_sqr());
            marked.add(a);
        }
        let marked = marked.value();
        PartitionStats::from_sums(
            p0.value(),
            marked,
            self.total_sum - marked,
            self.total_sum,
            subset.len(),
            self.n_total,
        )
    }
}

fn check_r(state: &PureState, r: usize) -> Result<()> {
    if r == 0 || r > state.n_total() {
        return Err(Error::InvalidCount {
            r,
            n_total: state.n_total(),
        });
    }
    Ok(())
}

fn subset_count(n_total: usize, r: usize) -> Result<u64> {
    match binomial(n_total as u64, r as u64) {
        Some(c) if c <= ENUMERATION_BUDGET => Ok(c),
        other => Err(Error::BudgetExceeded {
            subsets: other.map_or_else(|| format!("C({n_total}, {r})"), |c| c.to_string()),
            budget: ENUMERATION_BUDGET,
        }),
    }
}

/// Applies `visit` to every r-subset in lexicographic order, one fold per
/// block of ranks, and returns the per-block accumulators in block order.
fn fold_subsets<A, F>(exec: Exec, n_total: usize, r: usize, count: u64, visit: F) -> Vec<A>
where
    A: Default + Send,
    F: Fn(&mut A, &[usize]) + Sync + Send,
{
    let blocks = count.div_ceil(RANK_BLOCK) as usize;
    exec.map_indices(blocks, |b| {
        let start = b as u64 * RANK_BLOCK;
        let end = (start + RANK_BLOCK).min(count);
        let mut combo = unrank_combination(n_total, r, start);
        let mut acc = A::default();
        for rank in start..end {
            visit(&mut acc, &combo);
            if rank + 1 < end {
                next_combination(&mut combo, n_total);
            }
        }
        acc
    })
}

/// Exact ⟨P_s(t)⟩ over every r-subset.
pub fn average_success_exact(state: &PureState, r: usize, t: u64) -> Result<AverageEstimate> {
    average_success_exact_with(Exec::default(), state, r, t)
}

pub fn average_success_exact_with(
    exec: Exec,
    state: &PureState,
    r: usize,
    t: u64,
) -> Result<AverageEstimate> {
    check_r(state, r)?;
    let n_total = state.n_total();
    let count = subset_count(n_total, r)?;
    let omega = rotation_angle(n_total, r)?;
    let eval = SubsetEvaluator::new(state);
    let first: Vec<usize> = (0..r).collect();
    let reference = success_probability_closed(&eval.stats(&first), omega, t);
    let partials = fold_subsets(
        exec,
        n_total,
        r,
        count,
        |acc: &mut CompensatedSum, subset| {
            acc.add(success_probability_closed(&eval.stats(subset), omega, t) - reference);
        },
    );
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(AverageEstimate {
        value: clamp_unit(reference + total.value() / count as f64),
        std_error: 0.0,
        samples: count,
        method: AverageMethod::Enumeration,
    })
}

/// The `sample_index`-th uniformly random r-subset for `seed`, sorted.
///
/// Partial Fisher–Yates over a virtual identity permutation, drawing from the
/// ChaCha stream `sample_index` of `seed`.
pub fn sample_subset(n_total: usize, r: usize, seed: u64, sample_index: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * r);
    let mut out = Vec::with_capacity(r);
    for i in 0..r {
        let j = rng.random_range(i..n_total);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out.sort_unstable();
    out
}

/// Monte Carlo estimate of ⟨P_s(t)⟩ from `samples` random marked sets.
pub fn average_success_mc(
    state: &PureState,
    r: usize,
    t: u64,
    samples: usize,
    seed: u64,
) -> Result<AverageEstimate> {
    average_success_mc_with(Exec::default(), state, r, t, samples, seed)
}

pub fn average_success_mc_with(
    exec: Exec,
    state: &PureState,
    r: usize,
    t: u64,
    samples: usize,
    seed: u64,
) -> Result<AverageEstimate> {
    check_r(state, r)?;
    if samples < 2 {
        return Err(Error::InvalidSamples(samples));
    }
    let n_total = state.n_total();
    let omega = rotation_angle(n_total, r)?;
    let eval = SubsetEvaluator::new(state);
    let values = exec.map_indices(samples, |j| {
        let subset = sample_subset(n_total, r, seed, j as u64);
        success_probability_closed(&eval.stats(&subset), omega, t)
    });
    let (mean, std) = shifted_mean_std(&values);
    Ok(AverageEstimate {
        value: clamp_unit(mean),
        std_error: std / (samples as f64).sqrt(),
        samples: samples as u64,
        method: AverageMethod::MonteCarlo,
    })
}

/// N|ā|² sin²[ω(t + ½)] + (r/N)(1 − N|ā|²), dropping the O(1/N) remainder.
pub fn average_success_closed(state: &PureState, r: usize, t: u64) -> Result<f64> {
    check_r(state, r)?;
    closed_average(state.n_total(), r, state.global_mean().norm_sqr(), t)
}

pub(crate) fn closed_average(n_total: usize, r: usize, abs_abar_sqr: f64, t: u64) -> Result<f64> {
    let omega = rotation_angle(n_total, r)?;
    let n = n_total as f64;
    let lead = n * abs_abar_sqr;
    let s = (omega * (t as f64 + 0.5)).sin();
    Ok(lead * s * s + (r as f64 / n) * (1.0 - lead))
}

#[derive(Default)]
struct MomentSums {
    p0: CompensatedSum,
    u: CompensatedSum,
    m: CompensatedSum,
    cross: ComplexSum,
}

pub fn moment_averages(
    state: &PureState,
    r: usize,
    method: MomentMethod,
) -> Result<MomentAverages> {
    moment_averages_with(Exec::default(), state, r, method)
}

pub fn moment_averages_with(
    exec: Exec,
    state: &PureState,
    r: usize,
    method: MomentMethod,
) -> Result<MomentAverages> {
    check_r(state, r)?;
    let n_total = state.n_total();
    match method {
        MomentMethod::ClosedForm => {
            let a2 = state.global_mean().norm_sqr();
            let (rf, nf) = (r as f64, n_total as f64);
            Ok(MomentAverages {
                mean_p0: rf / nf,
                mean_abs_abar_u_sq: a2,
                mean_abs_abar_m_sq: a2 * (1.0 - 1.0 / rf) + 1.0 / (rf * nf),
                mean_cross: Complex64::new(a2, 0.0),
                r,
                n_total,
            })
        }
        MomentMethod::Enumeration => {
            let count = subset_count(n_total, r)?;
            let eval = SubsetEvaluator::new(state);
            let partials = fold_subsets(exec, n_total, r, count, |acc: &mut MomentSums, subset| {
                let st = eval.stats(subset);
                acc.p0.add(st.p0);
                acc.u.add(st.abar_u.norm_sqr());
                acc.m.add(st.abar_m.norm_sqr());
                acc.cross.add(st.abar_u.conj() * st.abar_m);
            });
            let mut total = MomentSums::default();
            for p in &partials {
                total.p0.merge(&p.p0);
                total.u.merge(&p.u);
                total.m.merge(&p.m);
                total.cross.merge(&p.cross);
            }
            let c = count as f64;
            Ok(MomentAverages {
                mean_p0: total.p0.value() / c,
                mean_abs_abar_u_sq: total.u.value() / c,
                mean_abs_abar_m_sq: total.m.value() / c,
                mean_cross: total.cross.value() / c,
                r,
                n_total,
            })
        }
    }
}

/// Leading-order success probability at t = τ: N|ā|² = |⟨η|ψ⟩|².
pub fn max_success(state: &PureState) -> f64 {
    state.n_total() as f64 * state.global_mean().norm_sqr()
}
