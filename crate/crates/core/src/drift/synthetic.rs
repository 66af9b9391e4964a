//! Processes with a prescribed multiplicative drift.
//!
//! The proportional mode works on real-valued states with an absorption
//! cutoff at one; it is a test device for the finite-state theorem, not a
//! claim about continuous state spaces.

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};

use crate::drift::PotentialTrace;
use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticMode {
    /// Integer state `s` drops by one with probability `delta * s`.
    UnitDecrement,
    /// `s <- s (1 - delta)`, absorbed at zero once it falls below one.
    Proportional,
}

fn validate(s0: u64, delta: f64, mode: SyntheticMode) -> Result<()> {
    if s0 == 0 {
        return Err(invalid("initial state must be positive"));
    }
    match mode {
        SyntheticMode::UnitDecrement => {
            if !(delta > 0.0 && delta * s0 as f64 <= 1.0) {
                return Err(invalid(format!(
                    "unit-decrement needs 0 < delta * s0 <= 1, got delta={delta}, s0={s0}"
                )));
            }
        }
        SyntheticMode::Proportional => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(invalid(format!("proportional mode needs 0 < delta < 1, got {delta}")));
            }
        }
    }
    Ok(())
}

/// Full trajectory of the process, from `s0` down to its terminal zero.
pub fn synthetic_multiplicative_process(
    s0: u64,
    delta: f64,
    seed: u64,
    mode: SyntheticMode,
) -> Result<PotentialTrace> {
    validate(s0, delta, mode)?;
    let mut values = vec![s0 as f64];
    match mode {
        SyntheticMode::UnitDecrement => {
            let mut rng = rng_from_seed(seed);
            let mut s = s0;
            while s > 0 {
                let p = (delta * s as f64).min(1.0);
                if rng.random_bool(p) {
                    s -= 1;
                }
                values.push(s as f64);
            }
        }
        SyntheticMode::Proportional => {
            let mut s = s0 as f64;
            while s > 0.0 {
                s *= 1.0 - delta;
                if s < 1.0 {
                    s = 0.0;
                }
                values.push(s);
            }
        }
    }
    Ok(PotentialTrace::from_parts(values, false))
}

/// Absorption time of the unit-decrement process.
///
/// Sojourn times at each level are sampled directly as geometric variables,
/// which has the same law as stepping one iteration at a time.
pub fn synthetic_hitting_time(s0: u64, delta: f64, rng: &mut Rng) -> Result<u64> {
    validate(s0, delta, SyntheticMode::UnitDecrement)?;
    let mut t = 0;
    for s in 1..=s0 {
        let p = (delta * s as f64).min(1.0);
        let failures = Geometric::new(p)
            .map_err(|e| invalid(format!("bad geometric parameter: {e}")))?
            .sample(rng);
        t += failures + 1;
    }
    Ok(t)
}
