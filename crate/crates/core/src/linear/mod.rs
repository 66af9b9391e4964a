//! Linear pseudo-Boolean functions and the drift facts proved about them.

mod bounds;
mod exact;
mod function;
mod levels;
mod montecarlo;
mod ordering;
mod potential;

pub use bounds::{bound_catalog, LinearBound};
pub use exact::{exact_pointwise_drift, lemma3_exhaustive_check, Lemma3Report, MAX_EXACT_N};
pub use function::{random_linear, FunctionSelection, LinearFunction, LinearKind};
pub use levels::{
    level_distribution_by_enumeration, level_probability, lemma5_monotonicity_check,
    Lemma5Report, LevelProbabilityTable,
};
pub use montecarlo::{
    lemma4_bound, lemma4_mc_check, theorem5_bit_probability_check, LevelCheck, LevelStatus,
    Lemma4Report, Theorem5Report,
};
pub use ordering::{ordering_test, OrderingTestResult};
pub use potential::Potential;
