//! Exact and symbolic checks that a local measurement on the last spin of a
//! nearest-neighbour ZZ Ising chain leaves the reduced dynamics of the spins
//! left of a cut spin `n` unchanged.
//!
//! - [`pauli`]: sparse Pauli-string algebra on up to 64 sites.
//! - [`dense`]: dense operators, spectral propagation and partial traces.
//! - [`model`]: chain Hamiltonians, initial states and measurement channels.
//! - [`series`]: the nested-commutator series and its tracelessness checks.
//! - [`experiments`]: no-signalling runs, counterexamples and baselines.

pub mod dense;
pub mod error;
pub mod experiments;
pub mod model;
pub mod pauli;
pub mod random;
pub mod series;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pauli-algebra.md")]
    mod pauli_algebra {}
    #[doc = include_str!("../../../book/src/dense-engine.md")]
    mod dense_engine {}
    #[doc = include_str!("../../../book/src/chain-model.md")]
    mod chain_model {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
