//! Special initial states: a single marked state, states in the Grover plane,
//! and states perpendicular to it.

use num_complex::Complex64;

use crate::algebraic::{build_frame, decompose};
use crate::error::{Error, Result};
use crate::state::{partition_stats, MarkedSet, PureState};

/// Coordinates below this magnitude count as zero when classifying.
pub const CLASSIFY_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    SingleMarked,
    InPlane,
    Perpendicular,
    Generic,
}

impl CaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseKind::SingleMarked => "single_marked",
            CaseKind::InPlane => "in_plane",
            CaseKind::Perpendicular => "perpendicular",
            CaseKind::Generic => "generic",
        }
    }
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Magnitudes of the four frame coordinates that decided the classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseWitness {
    pub psi_m: f64,
    pub psi_u: f64,
    pub eta_u: f64,
    pub eta_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseLabel {
    pub kind: CaseKind,
    pub witness: CaseWitness,
}

/// Radius and length of the cylinder traced by a real r = 1 evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderGeometry {
    pub radius: f64,
    pub length: f64,
}

pub fn classify(state: &PureState, marked: &MarkedSet) -> Result<CaseLabel> {
    let stats = partition_stats(state, marked)?;
    let frame = build_frame(state, marked)?;
    let v = decompose(state, &frame, &stats)?;
    let witness = CaseWitness {
        psi_m: v.c_psi_m.norm(),
        psi_u: v.c_psi_u.norm(),
        eta_u: v.c_eta_u.norm(),
        eta_m: v.c_eta_m.norm(),
    };
    let kind = if marked.len() == 1 {
        CaseKind::SingleMarked
    } else if witness.psi_m <= CLASSIFY_THRESHOLD && witness.psi_u <= CLASSIFY_THRESHOLD {
        CaseKind::InPlane
    } else if witness.eta_m <= CLASSIFY_THRESHOLD && witness.eta_u <= CLASSIFY_THRESHOLD {
        CaseKind::Perpendicular
    } else {
        CaseKind::Generic
    };
    Ok(CaseLabel { kind, witness })
}

/// R = √((N−1)|ā_U|² + |a_m|²) and L = 2√(1 − R²) for a real state with one
/// marked index.
pub fn cylinder_geometry(state: &PureState, marked_index: usize) -> Result<CylinderGeometry> {
    let marked = MarkedSet::new(state.n(), vec![marked_index])?;
    if let Some((index, a)) = state
        .amplitudes()
        .iter()
        .enumerate()
        .find(|(_, a)| a.im.abs() > 1e-12)
    {
        return Err(Error::ComplexAmplitudes { index, imag: a.im });
    }
    let stats = partition_stats(state, &marked)?;
    let unmarked = (stats.n_total - 1) as f64;
    let radius_sqr = unmarked * stats.abar_u.norm_sqr() + stats.abar_m.norm_sqr();
    let radius = radius_sqr.sqrt().min(1.0);
    let length = 2.0 * (1.0 - radius * radius).max(0.0).sqrt();
    Ok(CylinderGeometry { radius, length })
}

/// Rotation inside the Grover plane: (α, β) ↦ (α cos ωt − β sin ωt, α sin ωt + β cos ωt).
pub fn in_plane_evolution(
    alpha: Complex64,
    beta: Complex64,
    omega: f64,
    t: u64,
) -> Result<(Complex64, Complex64)> {
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized {
            norm_sqr,
            tolerance: 1e-10,
        });
    }
    let (sin, cos) = (omega * t as f64).sin_cos();
    Ok((alpha * cos - beta * sin, alpha * sin + beta * cos))
}

/// A state perpendicular to the Grover plane keeps P_s(t) = P₀ forever.
pub fn perpendicular_evolution(p0: f64, _t: u64) -> f64 {
    p0
}
