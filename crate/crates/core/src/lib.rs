//! A laboratory for drift analysis of the (1+1) evolutionary algorithm.
//!
//! The crate is split by subject:
//!
//! * [`drift`]: additive and multiplicative drift bounds, exact hitting times
//!   of absorbing Markov chains, empirical drift estimation and synthetic
//!   processes with a known drift.
//! * [`ea`]: the (1+1) EA itself (bit strings, standard bit mutation,
//!   elitist selection with ties accepted, seeded runs and batches).
//! * [`linear`]: linear pseudo-Boolean functions, potential functions, exact
//!   drift enumeration and the Monte-Carlo checks built on top of the engine.
//! * [`combinatorial`]: minimum spanning trees, single-source shortest paths
//!   and the Euler-tour surrogate process.
//!
//! Every randomized routine takes an explicit 64-bit seed. Batches derive one
//! child seed per repetition with [`rng::derive_seed`], so results do not
//! depend on how work is scheduled across threads.

pub mod combinatorial;
pub mod drift;
pub mod ea;
pub mod error;
pub mod linear;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
