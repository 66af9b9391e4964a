//! Paired comparison of optimisation times against OneMax.

use crate::ea::{run, run_reps, RunConfig};
use crate::error::{invalid, Result};
use crate::linear::{FunctionSelection, LinearFunction};
use crate::stats::{normal_upper_tail, Moments};

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingTestResult {
    pub n: usize,
    pub reps: u64,
    pub mean_onemax: f64,
    pub mean_other: f64,
    /// `(mean_other - mean_onemax) / mean_onemax`
    pub relative_gap: f64,
    /// Standard error of the mean paired difference.
    pub std_error: f64,
    /// One-sided p-value of `H0: mean_other <= mean_onemax`.
    pub one_sided_p: f64,
    /// `p <= 0.05`.
    pub significant: bool,
    /// Significant, or the means agree within two standard errors.
    pub passed: bool,
    pub capped: u64,
}

/// Runs OneMax and `other` with the same per-repetition seeds and tests
/// whether `other` takes longer on average.
pub fn ordering_test(
    n: usize,
    reps: u64,
    other: &FunctionSelection,
    seed: u64,
) -> Result<OrderingTestResult> {
    if reps < 2 {
        return Err(invalid("paired test needs at least two repetitions"));
    }
    let onemax = LinearFunction::onemax(n)?;
    let config = RunConfig::new(n, seed);
    let pairs = run_reps(reps, seed, |_, s| -> Result<Option<(f64, f64)>> {
        let cfg = config.clone().with_seed(s);
        let a = run(&onemax, &cfg)?;
        let f = other.instantiate(n, s)?;
        let b = run(&f, &cfg)?;
        Ok((!a.capped && !b.capped)
            .then_some((a.optimization_time as f64, b.optimization_time as f64)))
    });

    let mut om = Moments::new();
    let mut ot = Moments::new();
    let mut diff = Moments::new();
    let mut capped = 0;
    for p in pairs {
        match p? {
            Some((a, b)) => {
                om.push(a);
                ot.push(b);
                diff.push(b - a);
            }
            None => capped += 1,
        }
    }
    if diff.count() < 2 {
        return Err(invalid("fewer than two uncapped pairs"));
    }
    let se = diff.std_error();
    let one_sided_p = if se > 0.0 {
        normal_upper_tail(diff.mean() / se)
    } else if diff.mean() > 0.0 {
        0.0
    } else if diff.mean() < 0.0 {
        1.0
    } else {
        0.5
    };
    let significant = one_sided_p <= 0.05;
    Ok(OrderingTestResult {
        n,
        reps,
        mean_onemax: om.mean(),
        mean_other: ot.mean(),
        relative_gap: (ot.mean() - om.mean()) / om.mean(),
        std_error: se,
        one_sided_p,
        significant,
        passed: significant || diff.mean().abs() <= 2.0 * se,
        capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_comparison_has_no_gap() {
        let r = ordering_test(20, 50, &FunctionSelection::OneMax, 1).unwrap();
        assert_eq!(r.relative_gap, 0.0);
        assert_eq!(r.mean_onemax, r.mean_other);
        assert!(r.passed);
        assert!(!r.significant);
    }

    #[test]
    fn needs_two_reps() {
        assert!(ordering_test(10, 1, &FunctionSelection::BinVal, 0).is_err());
    }
}
