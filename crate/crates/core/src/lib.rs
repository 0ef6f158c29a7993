//! Complexity as advantage: regret dispersion across ladders of
//! resource-bounded observers.
//!
//! The crate is organised bottom-up:
//!
//! * [`sources`] generates seeded symbol sequences (periodic + noise, HMM,
//!   repeating-key XOR, elementary cellular automata, i.i.d., text).
//! * [`observers`] holds the predictors and lossless coders being compared.
//! * [`evaluation`] turns observer losses into regret tables and CAA
//!   statistics (variance and max-gap of regret under a prior).
//! * [`ladders`] builds budget-indexed advantage profiles and depth
//!   indicators.
//! * [`infotheory`] provides plug-in entropy estimators and exact oracles
//!   for Markov and hidden-Markov sources.
//! * [`experiments`] wires everything into the six reproducible runs exposed
//!   by the `caa` binary.

pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod infotheory;
pub mod ladders;
pub mod observers;
pub mod par;
pub mod rng;
pub mod sources;

pub use error::{Error, Result};
