//! Monte-Carlo checks on runs of the (1+1) EA.

use std::f64::consts::E;

use crate::drift::{DriftAccumulator, DriftEstimate};
use crate::ea::{run, run_reps, state_at, RunConfig};
use crate::error::{invalid, Result};
use crate::linear::{LinearFunction, Potential};
use crate::stats::Z95;

/// `(e - 2) k / (e n)`, the lower bound on the OneMax drift at level `k`.
pub fn lemma4_bound(n: usize, k: f64) -> f64 {
    (E - 2.0) * k / (E * n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelStatus {
    Passed,
    Failed,
    /// Fewer samples than required.
    Untested,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheck {
    pub estimate: DriftEstimate,
    pub bound: f64,
    pub status: LevelStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Report {
    pub n: usize,
    pub reps: u64,
    pub levels: Vec<LevelCheck>,
    pub capped_runs: u64,
    pub passed: bool,
}

impl Lemma4Report {
    pub fn tested(&self) -> impl Iterator<Item = &LevelCheck> {
        self.levels.iter().filter(|l| l.status != LevelStatus::Untested)
    }
}

/// Runs the EA on `f` and compares the OneMax drift at every level `k` with
/// at least `min_samples` observations to `(e - 2) k / (e n)`. Observations
/// are pooled over all iterations.
pub fn lemma4_mc_check(
    f: &LinearFunction,
    reps: u64,
    seed: u64,
    min_samples: u64,
) -> Result<Lemma4Report> {
    if reps < 1000 {
        return Err(invalid(format!("at least 1000 runs required, got {reps}")));
    }
    let n = f.len();
    let config = RunConfig::new(n, seed).with_potential(Potential::OneMax.as_fn());
    let partial = run_reps(reps, seed, |_, s| -> Result<(DriftAccumulator, bool)> {
        let record = run(f, &config.clone().with_seed(s))?;
        let mut acc = DriftAccumulator::new();
        if let Some(trace) = &record.trace {
            acc.observe_trace(trace);
        }
        Ok((acc, record.capped))
    });
    let mut acc = DriftAccumulator::new();
    let mut capped_runs = 0;
    for p in partial {
        let (a, capped) = p?;
        acc.merge(&a);
        capped_runs += u64::from(capped);
    }

    let levels: Vec<LevelCheck> = acc
        .estimates(crate::drift::Bucketing::ExactLevels)?
        .into_iter()
        .map(|estimate| {
            let bound = lemma4_bound(n, estimate.level);
            let status = if estimate.sample_count < min_samples {
                LevelStatus::Untested
            } else if estimate.mean_decrease + 2.0 * estimate.ci_halfwidth < bound {
                LevelStatus::Failed
            } else {
                LevelStatus::Passed
            };
            LevelCheck {
                estimate,
                bound,
                status,
            }
        })
        .collect();
    let passed = levels.iter().all(|l| l.status != LevelStatus::Failed);
    Ok(Lemma4Report {
        n,
        reps,
        levels,
        capped_runs,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem5Report {
    pub n: usize,
    pub t: u64,
    pub reps: u64,
    /// Estimated `P[x_i(t) = 0]` by position.
    pub zero_probability: Vec<f64>,
    pub ci_halfwidth: Vec<f64>,
    /// Positions `i` where `p_i - p_{i+1}` exceeds twice the combined
    /// half-width `sqrt(ci_i^2 + ci_{i+1}^2)`.
    pub violations: Vec<usize>,
    pub passed: bool,
}

/// Estimates the probability that each bit is zero after `t` iterations and
/// checks that it does not decrease with the bit's weight.
pub fn theorem5_bit_probability_check(
    f: &LinearFunction,
    t: u64,
    reps: u64,
    seed: u64,
) -> Result<Theorem5Report> {
    if reps < 1000 {
        return Err(invalid(format!("at least 1000 runs required, got {reps}")));
    }
    if f.weights().windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("weights must be strictly increasing"));
    }
    let n = f.len();
    let config = RunConfig::new(n, seed);
    let points = run_reps(reps, seed, |_, s| state_at(f, &config.clone().with_seed(s), t));
    let mut zeros = vec![0u64; n];
    for p in points {
        let x = p?;
        for (i, z) in zeros.iter_mut().enumerate() {
            *z += u64::from(!x.get(i));
        }
    }
    let zero_probability: Vec<f64> = zeros.iter().map(|&z| z as f64 / reps as f64).collect();
    let ci_halfwidth: Vec<f64> = zero_probability
        .iter()
        .map(|p| Z95 * (p * (1.0 - p) / reps as f64).sqrt())
        .collect();
    let violations: Vec<usize> = (0..n.saturating_sub(1))
        .filter(|&i| {
            let combined = ci_halfwidth[i].hypot(ci_halfwidth[i + 1]);
            zero_probability[i] - zero_probability[i + 1] > 2.0 * combined
        })
        .collect();
    Ok(Theorem5Report {
        n,
        t,
        reps,
        passed: violations.is_empty(),
        zero_probability,
        ci_halfwidth,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_bound_vanishes() {
        assert_eq!(lemma4_bound(50, 0.0), 0.0);
        assert!((lemma4_bound(10, 5.0) - (E - 2.0) / (2.0 * E)).abs() < 1e-15);
    }

    #[test]
    fn too_few_runs() {
        let f = LinearFunction::binval(5).unwrap();
        assert!(lemma4_mc_check(&f, 10, 0, 500).is_err());
        assert!(theorem5_bit_probability_check(&f, 10, 10, 0).is_err());
    }

    #[test]
    fn onemax_is_not_strictly_increasing() {
        let f = LinearFunction::onemax(5).unwrap();
        assert!(theorem5_bit_probability_check(&f, 10, 1000, 0).is_err());
    }

    #[test]
    fn single_bit_is_vacuous() {
        let f = LinearFunction::binval(1).unwrap();
        let r = theorem5_bit_probability_check(&f, 3, 1000, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.zero_probability, vec![1.0]);
    }

    #[test]
    fn initial_distribution_is_uniform() {
        let f = LinearFunction::binval(12).unwrap();
        let r = theorem5_bit_probability_check(&f, 0, 20_000, 5).unwrap();
        assert!(r.passed);
        for (p, ci) in r.zero_probability.iter().zip(&r.ci_halfwidth) {
            assert!((p - 0.5).abs() < 2.0 * ci, "p = {p}");
        }
    }

    #[test]
    fn onemax_drift_levels_pass() {
        let f = LinearFunction::onemax(30).unwrap();
        let r = lemma4_mc_check(&f, 1000, 3, 500).unwrap();
        assert!(r.passed);
        assert!(r.tested().count() > 5);
        assert_eq!(r.capped_runs, 0);
    }
}
