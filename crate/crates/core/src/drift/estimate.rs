//! Empirical conditional drift.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::stats::{Moments, Z95};

/// A realisation `X(0), X(1), ...` of a potential process.
///
/// Uncapped traces end at the first zero. Capped traces stopped at an
/// iteration limit before reaching zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTrace {
    values: Vec<f64>,
    capped: bool,
}

impl PotentialTrace {
    pub fn new(values: Vec<f64>, capped: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("trace has no values".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("trace value {v} is not a non-negative number")));
        }
        if !capped {
            let first_zero = values.iter().position(|&v| v == 0.0);
            if first_zero != Some(values.len() - 1) {
                return Err(invalid("uncapped trace must end at its first zero"));
            }
        }
        Ok(Self { values, capped })
    }

    pub(crate) fn from_parts(values: Vec<f64>, capped: bool) -> Self {
        debug_assert!(Self::new(values.clone(), capped).is_ok());
        Self { values, capped }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn capped(&self) -> bool {
        self.capped
    }

    /// Index of the terminal zero for an uncapped trace.
    pub fn hitting_time(&self) -> Option<usize> {
        (!self.capped).then(|| self.values.len() - 1)
    }

    /// Consecutive `(before, after)` pairs taken before absorption.
    pub fn transitions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(before, _)| *before != 0.0)
    }
}

/// Conditional mean decrease `E[X(t) - X(t+1) | X(t) in bucket]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftEstimate {
    /// Mean conditioning value of the bucket (the level itself for exact
    /// levels).
    pub level: f64,
    pub mean_decrease: f64,
    pub sample_count: u64,
    /// Normal-approximation 95% half-width.
    pub ci_halfwidth: f64,
}

impl DriftEstimate {
    pub fn relative_drift(&self) -> f64 {
        self.mean_decrease / self.level
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bucketing {
    /// Exact levels when every observed value is an integer, otherwise fifty
    /// equal-width buckets over the observed range.
    Auto,
    ExactLevels,
    Width(f64),
}

#[derive(Debug, Clone, Copy, Default)]
struct LevelStats {
    decrease: Moments,
}

/// Streaming collector of one-step decreases keyed by the pre-step value.
///
/// Collecting per exact level and bucketing afterwards gives the same
/// result as bucketing the raw transitions.
#[derive(Debug, Clone, Default)]
pub struct DriftAccumulator {
    // Keyed by the bit pattern of a non-negative float, which orders like the
    // float itself.
    levels: BTreeMap<u64, LevelStats>,
}

impl DriftAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, before: f64, after: f64) {
        if before == 0.0 {
            return;
        }
        debug_assert!(before > 0.0);
        self.levels
            .entry(before.to_bits())
            .or_default()
            .decrease
            .push(before - after);
    }

    pub fn observe_trace(&mut self, trace: &PotentialTrace) {
        for (before, after) in trace.transitions() {
            self.observe(before, after);
        }
    }

    pub fn merge(&mut self, other: &DriftAccumulator) {
        for (&k, v) in &other.levels {
            self.levels.entry(k).or_default().decrease.merge(&v.decrease);
        }
    }

    pub fn transition_count(&self) -> u64 {
        self.levels.values().map(|s| s.decrease.count()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    fn level_iter(&self) -> impl Iterator<Item = (f64, &Moments)> {
        self.levels
            .iter()
            .map(|(&k, s)| (f64::from_bits(k), &s.decrease))
    }

    pub fn estimates(&self, bucketing: Bucketing) -> Result<Vec<DriftEstimate>> {
        if self.is_empty() {
            return Err(Error::EmptyInput("no transitions before absorption".into()));
        }
        let width = match bucketing {
            Bucketing::ExactLevels => None,
            Bucketing::Width(w) => {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(invalid(format!("bucket width must be positive, got {w}")));
                }
                Some(w)
            }
            Bucketing::Auto => {
                if self.level_iter().all(|(l, _)| l.fract() == 0.0) {
                    None
                } else {
                    let lo = self.level_iter().next().map(|(l, _)| l).unwrap_or(0.0);
                    let hi = self.level_iter().last().map(|(l, _)| l).unwrap_or(0.0);
                    let range = hi - lo;
                    (range > 0.0).then_some(range / 50.0)
                }
            }
        };

        let lo = self.level_iter().next().map(|(l, _)| l).unwrap_or(0.0);
        let mut buckets: Vec<(i64, Group)> = Vec::new();
        for (level, m) in self.level_iter() {
            let key = match width {
                None => buckets.len() as i64,
                Some(w) => ((level - lo) / w).floor() as i64,
            };
            match buckets.last_mut() {
                Some((k, g)) if *k == key && width.is_some() => g.add(level, m),
                _ => {
                    let mut g = Group::default();
                    g.add(level, m);
                    buckets.push((key, g));
                }
            }
        }
        Ok(buckets.into_iter().map(|(_, g)| g.estimate()).collect())
    }

    /// Exact levels pooled with their neighbours (in increasing order) until
    /// every pooled bucket holds at least `min_samples` transitions. A short
    /// final bucket is folded into its predecessor.
    pub fn pooled_estimates(&self, min_samples: u64) -> Result<Vec<DriftEstimate>> {
        if self.is_empty() {
            return Err(Error::EmptyInput("no transitions before absorption".into()));
        }
        let mut groups: Vec<Group> = Vec::new();
        let mut current = Group::default();
        for (level, m) in self.level_iter() {
            current.add(level, m);
            if current.decrease.count() >= min_samples {
                groups.push(std::mem::take(&mut current));
            }
        }
        if current.decrease.count() > 0 {
            match groups.last_mut() {
                Some(last) => last.absorb(&current),
                None => groups.push(current),
            }
        }
        Ok(groups.iter().map(Group::estimate).collect())
    }
}

#[derive(Debug, Clone, Default)]
struct Group {
    level_weighted: f64,
    decrease: Moments,
}

impl Group {
    fn add(&mut self, level: f64, m: &Moments) {
        self.level_weighted += level * m.count() as f64;
        self.decrease.merge(m);
    }

    fn absorb(&mut self, other: &Group) {
        self.level_weighted += other.level_weighted;
        self.decrease.merge(&other.decrease);
    }

    fn estimate(&self) -> DriftEstimate {
        let n = self.decrease.count();
        DriftEstimate {
            level: self.level_weighted / n as f64,
            mean_decrease: self.decrease.mean(),
            sample_count: n,
            ci_halfwidth: Z95 * self.decrease.std_error(),
        }
    }
}

/// Estimates conditional one-step drift from a set of traces.
pub fn estimate_conditional_drift(
    traces: &[PotentialTrace],
    bucketing: Bucketing,
) -> Result<Vec<DriftEstimate>> {
    if traces.is_empty() {
        return Err(Error::EmptyInput("no traces".into()));
    }
    let mut acc = DriftAccumulator::new();
    for t in traces {
        acc.observe_trace(t);
    }
    acc.estimates(bucketing)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeCheck {
    pub passed: bool,
    pub delta: f64,
    /// Level with the smallest relative drift.
    pub worst_level: f64,
    pub worst_relative_drift: f64,
    /// Levels where `mean + 2 ci < delta * level`.
    pub violations: Vec<f64>,
}

/// Tests `E[X(t) - X(t+1) | X(t) = s] >= delta * s` on every estimate, with
/// two confidence half-widths of slack.
pub fn check_multiplicative_condition(
    estimates: &[DriftEstimate],
    delta: f64,
) -> Result<MultiplicativeCheck> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput("no drift estimates".into()));
    }
    let violations: Vec<f64> = estimates
        .iter()
        .filter(|e| e.mean_decrease + 2.0 * e.ci_halfwidth < delta * e.level)
        .map(|e| e.level)
        .collect();
    let worst = estimates
        .iter()
        .min_by(|a, b| a.relative_drift().total_cmp(&b.relative_drift()))
        .expect("non-empty");
    Ok(MultiplicativeCheck {
        passed: violations.is_empty(),
        delta,
        worst_level: worst.level,
        worst_relative_drift: worst.relative_drift(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(v: &[f64], capped: bool) -> PotentialTrace {
        PotentialTrace::new(v.to_vec(), capped).unwrap()
    }

    #[test]
    fn trace_invariants() {
        assert!(PotentialTrace::new(vec![], false).is_err());
        assert!(PotentialTrace::new(vec![3.0, -1.0, 0.0], false).is_err());
        assert!(PotentialTrace::new(vec![3.0, 1.0], false).is_err());
        assert!(PotentialTrace::new(vec![3.0, 0.0, 2.0, 0.0], false).is_err());
        assert!(PotentialTrace::new(vec![3.0, 1.0], true).is_ok());
        assert_eq!(trace(&[2.0, 1.0, 0.0], false).hitting_time(), Some(2));
        assert_eq!(trace(&[2.0, 1.0], true).hitting_time(), None);
    }

    #[test]
    fn deterministic_halving() {
        let traces = vec![trace(&[4.0, 2.0, 1.0, 0.0], false); 5];
        let est = estimate_conditional_drift(&traces, Bucketing::Auto).unwrap();
        assert_eq!(est.len(), 3);
        let top = est.iter().find(|e| e.level == 4.0).unwrap();
        assert_eq!(top.mean_decrease, 2.0);
        assert_eq!(top.ci_halfwidth, 0.0);
        assert_eq!(top.sample_count, 5);
    }

    #[test]
    fn capped_constant_trace() {
        let est = estimate_conditional_drift(&[trace(&[3.0; 10], true)], Bucketing::Auto).unwrap();
        assert_eq!(est.len(), 1);
        assert_eq!(est[0].mean_decrease, 0.0);
        assert_eq!(est[0].sample_count, 9);
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(
            estimate_conditional_drift(&[], Bucketing::Auto),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            estimate_conditional_drift(&[trace(&[0.0], false)], Bucketing::Auto),
            Err(Error::EmptyInput(_))
        ));
        assert!(estimate_conditional_drift(&[trace(&[1.0, 0.0], false)], Bucketing::Width(0.0))
            .is_err());
        assert!(check_multiplicative_condition(&[], 1.0).is_err());
    }

    #[test]
    fn width_buckets_pool_levels() {
        let t = trace(&[4.0, 3.5, 2.0, 1.5, 0.0], false);
        let est = estimate_conditional_drift(&[t], Bucketing::Width(1.0)).unwrap();
        // pre-step values {1.5, 2.0} and {3.5, 4.0} with lo = 1.5
        assert_eq!(est.len(), 2);
        assert!((est[1].level - 3.75).abs() < 1e-12);
        assert_eq!(est[0].sample_count, 2);
        assert!((est[0].level - 1.75).abs() < 1e-12);
        assert!((est[0].mean_decrease - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auto_uses_width_for_fractional_levels() {
        let values: Vec<f64> = (0..=200).rev().map(|i| i as f64 * 0.5).collect();
        let est = estimate_conditional_drift(&[trace(&values, false)], Bucketing::Auto).unwrap();
        assert!(est.len() <= 51 && est.len() >= 49, "{} buckets", est.len());
        let total: u64 = est.iter().map(|e| e.sample_count).sum();
        assert_eq!(total, 200);
    }

    #[test]
    fn pooling_reaches_minimum() {
        let traces: Vec<_> = (0..10)
            .map(|_| trace(&[5.0, 4.0, 3.0, 2.0, 1.0, 0.0], false))
            .collect();
        let mut acc = DriftAccumulator::new();
        traces.iter().for_each(|t| acc.observe_trace(t));
        let pooled = acc.pooled_estimates(20).unwrap();
        // {1, 2}, {3, 4} and the short {5} folded into the second
        assert_eq!(pooled.len(), 2);
        assert_eq!(pooled[1].sample_count, 30);
        assert_eq!(pooled.iter().map(|e| e.sample_count).sum::<u64>(), 50);
    }

    #[test]
    fn multiplicative_boundary_equality_passes() {
        let e = DriftEstimate {
            level: 1.0,
            mean_decrease: 1.0,
            sample_count: 10,
            ci_halfwidth: 0.0,
        };
        let check = check_multiplicative_condition(&[e], 1.0).unwrap();
        assert!(check.passed);
        assert_eq!(check.worst_level, 1.0);
        let check = check_multiplicative_condition(&[e], 1.5).unwrap();
        assert!(!check.passed);
        assert_eq!(check.violations, vec![1.0]);
    }
}
