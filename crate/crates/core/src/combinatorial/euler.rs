//! Expected-time bound for Eulerian cycles and a surrogate process with the
//! improvement probability the analysis assumes.

use std::f64::consts::E;

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};

use crate::drift::PotentialTrace;
use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, Rng};

fn check_m(m: usize) -> Result<()> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3 edges, got {m}")));
    }
    Ok(())
}

/// `e m ln m`.
pub fn euler_bound(m: usize) -> Result<f64> {
    check_m(m)?;
    let m = m as f64;
    Ok(E * m * m.ln())
}

/// `e m (1 + ln max(1, m/3 - 1))`, the multiplicative drift bound for a
/// start potential of at most `m/3 - 1`.
pub fn euler_bound_internal(m: usize) -> Result<f64> {
    check_m(m)?;
    let m = m as f64;
    Ok(E * m * (1.0 + (m / 3.0 - 1.0).max(1.0).ln()))
}

fn start_state(m: usize) -> u64 {
    (m / 3) as u64 - 1
}

/// State `s` starts at `floor(m/3) - 1` and drops by one with probability
/// `(s + 1) / (e m)` per step.
pub fn euler_surrogate_process(m: usize, seed: u64) -> Result<PotentialTrace> {
    check_m(m)?;
    let mut rng = rng_from_seed(seed);
    let mut s = start_state(m);
    let mut values = vec![s as f64];
    while s > 0 {
        if rng.random_bool(decrease_probability(s, m)) {
            s -= 1;
        }
        values.push(s as f64);
    }
    Ok(PotentialTrace::new(values, false)?)
}

/// Absorption time of the surrogate, sampling each sojourn directly.
pub fn euler_surrogate_hitting_time(m: usize, rng: &mut Rng) -> Result<u64> {
    check_m(m)?;
    let mut t = 0;
    for s in 1..=start_state(m) {
        let failures = Geometric::new(decrease_probability(s, m))
            .map_err(|e| invalid(format!("bad geometric parameter: {e}")))?
            .sample(rng);
        t += failures + 1;
    }
    Ok(t)
}

fn decrease_probability(s: u64, m: usize) -> f64 {
    (s as f64 + 1.0) / (E * m as f64)
}
