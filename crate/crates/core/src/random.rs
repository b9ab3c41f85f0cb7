//! Seeded generators for random states and marked sets.

use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::state::{MarkedSet, PureState};

fn normalize(mut amplitudes: Vec<Complex64>) -> Vec<Complex64> {
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amplitudes.iter_mut().for_each(|a| *a /= norm);
    amplitudes
}

/// Unitarily invariant random state: i.i.d. complex Gaussians, normalized.
pub fn random_state(n: u32, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = (0..1usize << n)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    PureState::new(n, normalize(amplitudes)).expect("normalized by construction")
}

/// Random state with real amplitudes.
pub fn random_real_state(n: u32, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = (0..1usize << n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    PureState::new(n, normalize(amplitudes)).expect("normalized by construction")
}

/// Uniformly random set of `r` marked indices.
pub fn random_marked_set(n: u32, r: usize, seed: u64) -> MarkedSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = index::sample(&mut rng, 1usize << n, r).into_vec();
    MarkedSet::new(n, indices).expect("distinct in-range indices")
}
