//! The (1+1) evolutionary algorithm with standard bit mutation.

mod bitstring;
mod engine;
mod mutation;
mod oracle;

pub use bitstring::BitString;
pub use engine::{
    default_max_iters, run, run_batch, run_reps, state_at, step, BatchSummary, Init, PotentialFn,
    RunConfig, RunRecord,
};
pub use mutation::{mutate, Mutator};
pub use oracle::FitnessOracle;
