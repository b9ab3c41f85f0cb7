//! Brute-force evolution of the full N-dimensional register under
//! Q = (−I + 2|η⟩⟨η|)·I_M.
//!
//! This engine makes no use of the four-dimensional structure and serves as
//! the reference every closed form is checked against.

use num_complex::Complex64;

use crate::algebraic::probability_bounds;
use crate::error::Result;
use crate::exec::Exec;
use crate::numeric::{clamp_unit, CompensatedSum, ComplexSum};
use crate::state::{partition_stats, MarkedSet, PureState};

/// One sampled iteration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub t: u64,
    pub p_success: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Mean amplitude of the marked states at time t.
    pub kbar: Complex64,
    /// Mean amplitude of the unmarked states at time t.
    pub lbar: Complex64,
}

/// Per-iteration record for t = 0, 1, …, t_max.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbabilityTrace {
    pub entries: Vec<TraceEntry>,
}

impl ProbabilityTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn p_success(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.p_success).collect()
    }
}

pub(crate) fn oracle_in_place(amplitudes: &mut [Complex64], marked: &MarkedSet) {
    for &m in marked.indices() {
        amplitudes[m] = -amplitudes[m];
    }
}

pub(crate) fn diffusion_in_place(amplitudes: &mut [Complex64], exec: Exec) {
    let mean = exec.sum(amplitudes) / amplitudes.len() as f64;
    let twice_mean = mean * 2.0;
    exec.for_each_mut(amplitudes, move |a| *a = twice_mean - *a);
}

/// Flips the sign of every marked amplitude.
pub fn apply_oracle(state: &PureState, marked: &MarkedSet) -> Result<PureState> {
    state.check_dimension(marked.n())?;
    let mut amplitudes = state.amplitudes().to_vec();
    oracle_in_place(&mut amplitudes, marked);
    Ok(PureState::from_evolved(state.n(), amplitudes))
}

/// Inversion about the mean: a_i ↦ 2ā − a_i.
pub fn apply_diffusion(state: &PureState) -> PureState {
    let mut amplitudes = state.amplitudes().to_vec();
    diffusion_in_place(&mut amplitudes, Exec::default());
    PureState::from_evolved(state.n(), amplitudes)
}

/// One Grover iteration: oracle, then diffusion.
pub fn grover_step(state: &PureState, marked: &MarkedSet) -> Result<PureState> {
    evolve(state, marked, 1)
}

/// Q^t |ψ⟩ by repeated stepping.
pub fn evolve(state: &PureState, marked: &MarkedSet, t: u64) -> Result<PureState> {
    evolve_with(Exec::default(), state, marked, t)
}

pub fn evolve_with(exec: Exec, state: &PureState, marked: &MarkedSet, t: u64) -> Result<PureState> {
    let mut run = GroverRun::with_exec(exec, state, marked)?;
    run.advance(t);
    Ok(run.into_state())
}

/// Σ_{m∈𝓜} |a_m|².
pub fn success_probability(state: &PureState, marked: &MarkedSet) -> Result<f64> {
    state.check_dimension(marked.n())?;
    Ok(marked_population(state.amplitudes(), marked))
}

fn marked_population(amplitudes: &[Complex64], marked: &MarkedSet) -> f64 {
    let p: CompensatedSum = marked
        .indices()
        .iter()
        .map(|&m| amplitudes[m].norm_sqr())
        .collect();
    clamp_unit(p.value())
}

/// Evolves the state for `t_max` iterations, measuring each step directly.
///
/// `p_min`/`p_max` are the bounds of the initial state, which are constant in
/// time.
pub fn trace_run(state: &PureState, marked: &MarkedSet, t_max: u64) -> Result<ProbabilityTrace> {
    trace_run_with(Exec::default(), state, marked, t_max)
}

pub fn trace_run_with(
    exec: Exec,
    state: &PureState,
    marked: &MarkedSet,
    t_max: u64,
) -> Result<ProbabilityTrace> {
    let stats = partition_stats(state, marked)?;
    let (p_min, p_max) = probability_bounds(&stats)?;
    let mut run = GroverRun::with_exec(exec, state, marked)?;
    let mut entries = Vec::with_capacity(t_max as usize + 1);
    loop {
        let (kbar, lbar) = run.mean_amplitudes();
        entries.push(TraceEntry {
            t: run.t(),
            p_success: run.success_probability(),
            p_min,
            p_max,
            kbar,
            lbar,
        });
        if run.t() == t_max {
            break;
        }
        run.step();
    }
    Ok(ProbabilityTrace { entries })
}

/// An in-place Grover evolution that can be stepped and inspected.
#[derive(Debug, Clone)]
pub struct GroverRun {
    n: u32,
    amplitudes: Vec<Complex64>,
    marked: MarkedSet,
    exec: Exec,
    t: u64,
    /// Σ a_i of the current amplitudes, refreshed by every step.
    total: Complex64,
}

impl GroverRun {
    pub fn new(state: &PureState, marked: &MarkedSet) -> Result<Self> {
        Self::with_exec(Exec::default(), state, marked)
    }

    pub fn with_exec(exec: Exec, state: &PureState, marked: &MarkedSet) -> Result<Self> {
        state.check_dimension(marked.n())?;
        Ok(Self {
            n: state.n(),
            amplitudes: state.amplitudes().to_vec(),
            marked: marked.clone(),
            exec,
            t: 0,
            total: exec.sum(state.amplitudes()),
        })
    }

    /// One iteration in a single pass over the amplitudes: the post-oracle sum
    /// is the running total minus twice the marked sum, and the diffusion
    /// update accumulates the next total as it writes.
    pub fn step(&mut self) {
        let marked_sum = self.marked_sum();
        oracle_in_place(&mut self.amplitudes, &self.marked);
        let flipped_total = self.total - marked_sum * 2.0;
        let twice_mean = flipped_total * (2.0 / self.amplitudes.len() as f64);
        self.total = self
            .exec
            .update_and_sum(&mut self.amplitudes, move |a| *a = twice_mean - *a);
        self.t += 1;
    }

    fn marked_sum(&self) -> Complex64 {
        let s: ComplexSum = self
            .marked
            .indices()
            .iter()
            .map(|&m| self.amplitudes[m])
            .collect();
        s.value()
    }

    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn state(&self) -> PureState {
        PureState::from_evolved(self.n, self.amplitudes.clone())
    }

    pub fn into_state(self) -> PureState {
        PureState::from_evolved(self.n, self.amplitudes)
    }

    pub fn success_probability(&self) -> f64 {
        marked_population(&self.amplitudes, &self.marked)
    }

    /// Empirical (k̄, l̄): means of the current marked and unmarked amplitudes.
    pub fn mean_amplitudes(&self) -> (Complex64, Complex64) {
        let marked_sum = self.marked_sum();
        let r = self.marked.len();
        let n_total = self.amplitudes.len();
        let kbar = marked_sum / r as f64;
        if r == n_total {
            return (kbar, Complex64::new(0.0, 0.0));
        }
        (kbar, (self.total - marked_sum) / (n_total - r) as f64)
    }
}
