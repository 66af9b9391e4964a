//! Drift theorems as executable checks.
//!
//! [`bounds`] evaluates the additive and multiplicative drift bounds,
//! [`chain`] computes exact expected hitting times of absorbing Markov chains
//! (the potential whose drift is exactly one), [`estimate`] measures
//! conditional drift from observed potential sequences, and [`synthetic`]
//! generates processes whose drift is known in closed form.

pub mod bounds;
pub mod chain;
pub mod estimate;
pub mod synthetic;

pub use bounds::{additive_bound, multiplicative_bound, BoundSpec};
pub use chain::{
    ideal_potential, ideal_potential_with_cap, monte_carlo_hitting_time, verify_unit_drift,
    AbsorbingChain, ChainSampler,
};
pub use estimate::{
    check_multiplicative_condition, estimate_conditional_drift, Bucketing, DriftAccumulator,
    DriftEstimate, MultiplicativeCheck, PotentialTrace,
};
pub use synthetic::{synthetic_hitting_time, synthetic_multiplicative_process, SyntheticMode};
