//! Seeded generators for every source used by the experiments.
//!
//! All generators are pure functions of their parameters and a `u64` seed.
//! The resulting [`SymbolSequence`] carries a [`SourceDescriptor`] from which
//! the exact same symbols can be regenerated.

mod crypto;
mod eca;
mod hmm;
mod iid;
mod periodic;
mod sequence;

pub use crypto::{gen_xor_crypto, lcm, random_key, random_primitive_key, CryptoParams, DEFAULT_PREFIX_LEN};
pub use eca::{gen_eca, gen_eca_from_row, rule_table, step_wrapped, Boundary, EcaRun, EcaSpec, PredictionInstance};
pub use hmm::{gen_hmm, HmmParams};
pub use iid::{gen_iid, gen_markov_chain, load_text, MarkovChainParams};
pub use periodic::{gen_periodic_noise, gen_periodic_noise_with, PhaseClock};
pub use sequence::{SourceDescriptor, SourceParams, SymbolSequence};
