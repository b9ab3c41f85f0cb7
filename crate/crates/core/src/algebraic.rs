//! The four-dimensional closed-form engine.
//!
//! For any initial state and marked set, Q leaves invariant the span of
//!
//! * ψ_M: the marked-subspace part of the state orthogonal to η_M,
//! * ψ_U: the unmarked-subspace part of the state orthogonal to η_U,
//! * η_U, η_M: the normalized unmarked and marked projections of η.
//!
//! In that basis Q is `diag(1, −1) ⊕ R(ω)` with cos ω = 1 − 2r/N, so t
//! iterations reduce to a sign flip and a plane rotation by ωt. Everything in
//! this module is evaluated from that structure alone, never by stepping.
//!
//! When N = 2 and r = 1 both subspaces are one-dimensional, so neither ψ
//! vector can exist; the general formulas are used unchanged in that case.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{clamp_unit, CompensatedSum};
use crate::state::{partition_stats, MarkedSet, PartitionStats, PureState};
use crate::statevector::{ProbabilityTrace, TraceEntry};

/// Gram–Schmidt denominators below this are treated as a missing direction.
pub const DEGENERATE_THRESHOLD: f64 = 1e-7;
/// Bounds may leave [0, 1] by at most this much before it is an error.
pub const BOUND_TOLERANCE: f64 = 1e-12;

/// (−1)^t from the parity of t.
#[inline]
pub fn parity_sign(t: u64) -> f64 {
    if t.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The orthonormal quadruple (ψ_M, ψ_U, η_U, η_M) for one state/marked-set pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FourDFrame {
    pub psi_m: Option<PureState>,
    pub psi_u: Option<PureState>,
    pub eta_u: PureState,
    pub eta_m: PureState,
    pub omega: f64,
    marked: MarkedSet,
    stats: PartitionStats,
    norm_m: f64,
    norm_u: f64,
}

/// Coordinates in a [`FourDFrame`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourDVector {
    pub c_psi_m: Complex64,
    pub c_psi_u: Complex64,
    pub c_eta_u: Complex64,
    pub c_eta_m: Complex64,
}

impl FourDVector {
    pub fn new(
        c_psi_m: Complex64,
        c_psi_u: Complex64,
        c_eta_u: Complex64,
        c_eta_m: Complex64,
    ) -> Self {
        Self {
            c_psi_m,
            c_psi_u,
            c_eta_u,
            c_eta_m,
        }
    }

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.c_psi_m, self.c_psi_u, self.c_eta_u, self.c_eta_m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability on the marked plane (ψ_M, η_M).
    pub fn marked_probability(&self) -> f64 {
        self.c_psi_m.norm_sqr() + self.c_eta_m.norm_sqr()
    }
}

impl FourDFrame {
    pub fn marked(&self) -> &MarkedSet {
        &self.marked
    }

    pub fn stats(&self) -> &PartitionStats {
        &self.stats
    }

    /// The Gram–Schmidt denominators √(P₀ − r|ā_M|²) and √(1 − P₀ − (N−r)|ā_U|²).
    pub fn gram_schmidt_norms(&self) -> (f64, f64) {
        (self.norm_m, self.norm_u)
    }

    /// The present basis vectors, labelled.
    pub fn members(&self) -> Vec<(&'static str, &PureState)> {
        let mut out = Vec::with_capacity(4);
        if let Some(p) = &self.psi_m {
            out.push(("psi_m", p));
        }
        if let Some(p) = &self.psi_u {
            out.push(("psi_u", p));
        }
        out.push(("eta_u", &self.eta_u));
        out.push(("eta_m", &self.eta_m));
        out
    }

    /// Σ_k c_k |basis_k⟩ as a full amplitude vector.
    pub fn synthesize(&self, vec: &FourDVector) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .eta_u
            .amplitudes()
            .iter()
            .zip(self.eta_m.amplitudes())
            .map(|(u, m)| vec.c_eta_u * u + vec.c_eta_m * m)
            .collect();
        for (basis, c) in [(&self.psi_m, vec.c_psi_m), (&self.psi_u, vec.c_psi_u)] {
            if let Some(b) = basis {
                for (o, a) in out.iter_mut().zip(b.amplitudes()) {
                    *o += c * a;
                }
            }
        }
        out
    }
}

fn indicator_state(n: u32, indices: impl Iterator<Item = usize>, count: usize) -> PureState {
    let value = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1usize << n];
    for i in indices {
        amplitudes[i] = value;
    }
    PureState::from_evolved(n, amplitudes)
}

/// Normalized deviations (a_i − mean)/‖·‖ on `indices`, or `None` when the
/// deviation norm is below [`DEGENERATE_THRESHOLD`].
fn deviation_state(
    state: &PureState,
    indices: impl Iterator<Item = usize> + Clone,
    mean: Complex64,
) -> (Option<PureState>, f64) {
    let a = state.amplitudes();
    let norm_sqr: CompensatedSum = indices.clone().map(|i| (a[i] - mean).norm_sqr()).collect();
    let norm = norm_sqr.value().sqrt();
    if norm < DEGENERATE_THRESHOLD {
        return (None, norm);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); a.len()];
    for i in indices {
        amplitudes[i] = (a[i] - mean) / norm;
    }
    (Some(PureState::from_evolved(state.n(), amplitudes)), norm)
}

/// Gram–Schmidt construction of the invariant four-dimensional frame.
///
/// ψ_M ∝ √P₀|φ_M⟩ − √r ā_M|η_M⟩ is exactly the vector of marked deviations
/// a_m − ā_M, and likewise for ψ_U, so the frame is built from deviations
/// directly; the normalizers are computed as the deviation norms.
pub fn build_frame(state: &PureState, marked: &MarkedSet) -> Result<FourDFrame> {
    let stats = partition_stats(state, marked)?;
    if stats.is_fully_marked() {
        return Err(Error::FullyMarked);
    }
    let n = state.n();
    let r = marked.len();
    let n_total = state.n_total();
    let omega = rotation_angle(n_total, r)?;
    let eta_m = indicator_state(n, marked.indices().iter().copied(), r);
    let eta_u = indicator_state(n, marked.unmarked(), n_total - r);
    let (psi_m, norm_m) = deviation_state(state, marked.indices().iter().copied(), stats.abar_m);
    let (psi_u, norm_u) = deviation_state(state, marked.unmarked(), stats.abar_u);
    Ok(FourDFrame {
        psi_m,
        psi_u,
        eta_u,
        eta_m,
        omega,
        marked: marked.clone(),
        stats,
        norm_m,
        norm_u,
    })
}

/// Coordinates (√(P₀ − r|ā_M|²), √(1 − P₀ − (N−r)|ā_U|²), √(N−r)·ā_U, √r·ā_M).
///
/// Coordinates of absent ψ directions are 0.
pub fn decompose(
    state: &PureState,
    frame: &FourDFrame,
    stats: &PartitionStats,
) -> Result<FourDVector> {
    if state.n() != frame.marked.n() {
        return Err(Error::FrameMismatch(format!(
            "state has {} qubits, frame was built for {}",
            state.n(),
            frame.marked.n()
        )));
    }
    let fs = &frame.stats;
    if stats.r != fs.r || stats.n_total != fs.n_total {
        return Err(Error::FrameMismatch(format!(
            "statistics are for r = {} of N = {}, frame has r = {} of N = {}",
            stats.r, stats.n_total, fs.r, fs.n_total
        )));
    }
    let close = (stats.p0 - fs.p0).abs() <= 1e-12
        && (stats.abar_m - fs.abar_m).norm() <= 1e-12
        && (stats.abar_u - fs.abar_u).norm() <= 1e-12;
    if !close {
        return Err(Error::FrameMismatch(
            "statistics do not describe the state the frame was built from".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let r = stats.r as f64;
    let u = (stats.n_total - stats.r) as f64;
    Ok(FourDVector {
        c_psi_m: if frame.psi_m.is_some() {
            Complex64::new(frame.norm_m, 0.0)
        } else {
            zero
        },
        c_psi_u: if frame.psi_u.is_some() {
            Complex64::new(frame.norm_u, 0.0)
        } else {
            zero
        },
        c_eta_u: stats.abar_u * u.sqrt(),
        c_eta_m: stats.abar_m * r.sqrt(),
    })
}

fn check_count(n_total: usize, r: usize) -> Result<()> {
    if r == 0 || r > n_total {
        return Err(Error::InvalidCount { r, n_total });
    }
    Ok(())
}

/// (cos ω, sin ω) = (1 − 2r/N, 2√(r(N−r))/N), from exact integer numerators.
pub fn rotation_cos_sin(n_total: usize, r: usize) -> Result<(f64, f64)> {
    check_count(n_total, r)?;
    let n = n_total as f64;
    let cos = (n_total as i128 - 2 * r as i128) as f64 / n;
    let sin = 2.0 * ((r as u128 * (n_total - r) as u128) as f64).sqrt() / n;
    Ok((cos, sin))
}

/// ω ∈ (0, π].
pub fn rotation_angle(n_total: usize, r: usize) -> Result<f64> {
    let (cos, sin) = rotation_cos_sin(n_total, r)?;
    Ok(sin.atan2(cos))
}

/// Q^t in the frame: ψ_M fixed, ψ_U times (−1)^t, (η_U, η_M) rotated by ωt.
pub fn evolve_closed(vec: &FourDVector, omega: f64, t: u64) -> FourDVector {
    let (sin, cos) = (omega * t as f64).sin_cos();
    FourDVector {
        c_psi_m: vec.c_psi_m,
        c_psi_u: vec.c_psi_u * parity_sign(t),
        c_eta_u: vec.c_eta_u * cos - vec.c_eta_m * sin,
        c_eta_m: vec.c_eta_u * sin + vec.c_eta_m * cos,
    }
}

/// Closed-form P_s(t):
///
/// P₀ + ½D − ½D·cos 2ωt + ½√(r(N−r))·2Re(ā_U* ā_M)·sin 2ωt,
/// with D = (N−r)|ā_U|² − r|ā_M|².
pub fn success_probability_closed(stats: &PartitionStats, omega: f64, t: u64) -> f64 {
    let r = stats.r as f64;
    let u = (stats.n_total - stats.r) as f64;
    let d = u * stats.abar_u.norm_sqr() - r * stats.abar_m.norm_sqr();
    let cross = stats.abar_u.conj() * stats.abar_m + stats.abar_m.conj() * stats.abar_u;
    let (sin2, cos2) = (2.0 * omega * t as f64).sin_cos();
    stats.p0 + 0.5 * d - 0.5 * d * cos2 + 0.5 * (r * u).sqrt() * cross.re * sin2
}

/// (P_min, P_max) = (P₀ − r|ā_M|², P₀ + (N−r)|ā_U|²).
pub fn probability_bounds(stats: &PartitionStats) -> Result<(f64, f64)> {
    let r = stats.r as f64;
    let u = (stats.n_total - stats.r) as f64;
    let p_min = stats.p0 - r * stats.abar_m.norm_sqr();
    let p_max = stats.p0 + u * stats.abar_u.norm_sqr();
    for bound in [p_min, p_max] {
        if !(-BOUND_TOLERANCE..=1.0 + BOUND_TOLERANCE).contains(&bound) {
            return Err(Error::InconsistentStats { bound });
        }
    }
    Ok((clamp_unit(p_min), clamp_unit(p_max)))
}

/// Marked and unmarked mean amplitudes (k̄(t), l̄(t)) after t iterations.
pub fn mean_amplitudes(
    stats: &PartitionStats,
    omega: f64,
    t: u64,
) -> Result<(Complex64, Complex64)> {
    if stats.is_fully_marked() {
        return Err(Error::FullyMarked);
    }
    let r = stats.r as f64;
    let u = (stats.n_total - stats.r) as f64;
    let (sin, cos) = (omega * t as f64).sin_cos();
    let kbar = stats.abar_u * ((u / r).sqrt() * sin) + stats.abar_m * cos;
    let lbar = stats.abar_u * cos - stats.abar_m * ((r / u).sqrt() * sin);
    Ok((kbar, lbar))
}

/// Q^t|ψ⟩ assembled as (k̄ + Δa_m) on marked and (l̄ + (−1)^t Δa_u) on
/// unmarked indices, with Δa the deviations of the initial state.
pub fn reconstruct_state(initial: &PureState, marked: &MarkedSet, t: u64) -> Result<PureState> {
    let stats = partition_stats(initial, marked)?;
    if stats.is_fully_marked() {
        return Err(Error::FullyMarked);
    }
    let omega = rotation_angle(stats.n_total, stats.r)?;
    let (kbar, lbar) = mean_amplitudes(&stats, omega, t)?;
    let sign = parity_sign(t);
    let mask = marked.mask();
    let amplitudes = initial
        .amplitudes()
        .iter()
        .zip(mask)
        .map(|(&a, is_marked)| {
            if is_marked {
                kbar + (a - stats.abar_m)
            } else {
                lbar + (a - stats.abar_u) * sign
            }
        })
        .collect();
    Ok(PureState::from_evolved(initial.n(), amplitudes))
}

/// τ = ⌊(π/4)√(N/r)⌋.
pub fn optimal_iterations(n_total: usize, r: usize) -> Result<u64> {
    check_count(n_total, r)?;
    Ok((std::f64::consts::FRAC_PI_4 * (n_total as f64 / r as f64).sqrt()).floor() as u64)
}

/// The trace of [`crate::statevector::trace_run`], evaluated from closed forms.
///
/// With every index marked the unmarked mean is reported as 0 and the marked
/// mean alternates sign, which is what the general formula gives at ω = π.
pub fn closed_trace(state: &PureState, marked: &MarkedSet, t_max: u64) -> Result<ProbabilityTrace> {
    let stats = partition_stats(state, marked)?;
    let omega = rotation_angle(stats.n_total, stats.r)?;
    let (p_min, p_max) = probability_bounds(&stats)?;
    let entries = (0..=t_max)
        .map(|t| {
            let (kbar, lbar) = if stats.is_fully_marked() {
                (stats.abar_m * parity_sign(t), Complex64::new(0.0, 0.0))
            } else {
                mean_amplitudes(&stats, omega, t)?
            };
            Ok(TraceEntry {
                t,
                p_success: clamp_unit(success_probability_closed(&stats, omega, t)),
                p_min,
                p_max,
                kbar,
                lbar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTrace { entries })
}
