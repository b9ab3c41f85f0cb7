//! JSON file formats for states, ensembles, marked sets and bipartite states.
//!
//! Amplitudes are `[re, im]` pairs. Unknown keys are rejected, and parsed
//! values go through the same validation as the in-memory constructors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixed::BipartiteState;
use crate::state::{MarkedSet, MixedEnsemble, PureState};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    n: u32,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberFile {
    p: f64,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    n: u32,
    members: Vec<MemberFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkedFile {
    indices: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BipartiteFile {
    n_alice: u32,
    k_bob: u32,
    amplitudes: Vec<[f64; 2]>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_complex(pairs: Vec<[f64; 2]>) -> Vec<Complex64> {
    pairs
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect()
}

fn to_pairs(amps: &[Complex64]) -> Vec<[f64; 2]> {
    amps.iter().map(|a| [a.re, a.im]).collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data always serializes")
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let f: StateFile = parse(text)?;
    PureState::new(f.n, to_complex(f.amplitudes))
}

pub fn parse_ensemble(text: &str) -> Result<MixedEnsemble> {
    let f: EnsembleFile = parse(text)?;
    let members = f
        .members
        .into_iter()
        .map(|m| Ok((m.p, PureState::new(f.n, to_complex(m.amplitudes))?)))
        .collect::<Result<Vec<_>>>()?;
    MixedEnsemble::new(members)
}

pub fn parse_marked(n: u32, text: &str) -> Result<MarkedSet> {
    let f: MarkedFile = parse(text)?;
    MarkedSet::new(n, f.indices)
}

pub fn parse_bipartite(text: &str) -> Result<BipartiteState> {
    let f: BipartiteFile = parse(text)?;
    BipartiteState::new(f.n_alice, f.k_bob, to_complex(f.amplitudes))
}

pub fn state_to_json(state: &PureState) -> String {
    to_json(&StateFile {
        n: state.n(),
        amplitudes: to_pairs(state.amplitudes()),
    })
}

pub fn ensemble_to_json(ens: &MixedEnsemble) -> String {
    to_json(&EnsembleFile {
        n: ens.n(),
        members: ens
            .members()
            .iter()
            .map(|(p, s)| MemberFile {
                p: *p,
                amplitudes: to_pairs(s.amplitudes()),
            })
            .collect(),
    })
}

pub fn marked_to_json(marked: &MarkedSet) -> String {
    to_json(&MarkedFile {
        indices: marked.indices().to_vec(),
    })
}

pub fn bipartite_to_json(state: &BipartiteState) -> String {
    to_json(&BipartiteFile {
        n_alice: state.n_alice(),
        k_bob: state.k_bob(),
        amplitudes: to_pairs(state.amplitudes()),
    })
}
