//! Generalised Mermin-type non-locality arguments over finite abelian groups.
//!
//! An argument is a finite abelian group `K`, a system of `Z`-module equations
//! valued in `K`, a solution of that system in the torus of phases and a party
//! count `N` coprime to the exponent of `K`. From it this crate derives the
//! measurement scenario and its exact empirical model, decides contextuality
//! (algebraically, by explicit LHV construction and by global-section search),
//! extracts All-vs-Nothing equation families, realises the model on a qudit
//! state-vector simulator, and simulates the secret sharing protocol built on
//! top of it.

pub mod abelian;
pub mod contextuality;
mod error;
pub mod fixtures;
pub mod io;
pub mod protocol;
pub mod quantum;
pub mod scenario;

pub use error::{Error, ErrorKind};

/// Default cap on brute-force search spaces (assignments).
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

/// Default cap on state-vector sizes (amplitudes).
pub const DEFAULT_AMPLITUDE_CAP: u64 = 1_000_000;
