//! Grover search with arbitrary pure and mixed initial states.
//!
//! Two independent engines are provided:
//!
//! * [`statevector`] evolves the full 2^n amplitude vector step by step;
//! * [`algebraic`] evaluates the same evolution in closed form inside the
//!   four-dimensional subspace that Q leaves invariant.
//!
//! On top of them, [`special`] classifies initial states, [`averaging`]
//! averages the success probability over the unknown marked set, and
//! [`mixed`] covers ensembles, pseudo-pure states and partial-register search.
//!
//! Data-parallel kernels run on rayon when the `parallel` feature is enabled
//! (the default); see [`exec::Exec`].

pub mod algebraic;
pub mod averaging;
pub mod error;
pub mod exec;
pub mod io;
pub mod mixed;
pub mod numeric;
pub mod random;
pub mod special;
pub mod state;
pub mod statevector;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64;
pub use state::{
    global_mean, partition_stats, uniform_state, MarkedSet, MixedEnsemble, PartitionStats,
    PureState,
};
