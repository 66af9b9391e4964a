//! Distribution of the number of one-bits after a mutation.

use crate::error::{invalid, Error, Result};
use crate::stats::CompensatedSum;

const MAX_LEMMA5_N: usize = 14;
const MAX_ENUMERATION_N: usize = 20;
/// Enumeration cross-check is limited to this size in the monotonicity check.
const CROSS_CHECK_N: usize = 12;
/// Rounding allowance when comparing two probabilities that are equal in
/// exact arithmetic (e.g. `n = 2, k = 1, j = 0` against `k' = 2`).
const ORDER_TOLERANCE: f64 = 1e-15;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that a parent with `k` one-bits produces an offspring with
/// exactly `j` one-bits under mutation rate `1/n`.
///
/// Sums over `i`, the number of zero-bits that flip; then `k - j + i`
/// one-bits must flip as well.
pub fn level_probability(n: usize, k: usize, j: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if k > n || j > n {
        return Err(invalid(format!("levels must lie in 0..={n}, got k={k}, j={j}")));
    }
    Ok(level_probability_unchecked(n, k, j))
}

fn level_probability_unchecked(n: usize, k: usize, j: usize) -> f64 {
    let p = 1.0 / n as f64;
    let q = 1.0 - p;
    let lo = j.saturating_sub(k);
    let hi = j.min(n - k);
    let mut sum = CompensatedSum::new();
    for i in lo..=hi {
        let flips = k + 2 * i - j;
        let term = binomial(k, j - i)
            * binomial(n - k, i)
            * p.powi(flips as i32)
            * q.powi((n - flips) as i32);
        sum.add(term);
    }
    sum.value()
}

/// The same distribution by brute force over all `2^n` mutation masks of
/// the parent `1^k 0^(n-k)`.
pub fn level_distribution_by_enumeration(n: usize, k: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::TooLarge(format!("enumeration needs 1 <= n <= {MAX_ENUMERATION_N}")));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let p = 1.0 / n as f64;
    let parent: u64 = (1u64 << k) - 1;
    let mut sums = vec![CompensatedSum::new(); n + 1];
    for mask in 0u64..(1u64 << n) {
        let flips = mask.count_ones() as i32;
        let prob = p.powi(flips) * (1.0 - p).powi(n as i32 - flips);
        let ones = (parent ^ mask).count_ones() as usize;
        sums[ones].add(prob);
    }
    Ok(sums.iter().map(CompensatedSum::value).collect())
}

/// All level probabilities for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelProbabilityTable {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl LevelProbabilityTable {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let rows = (0..=n)
            .map(|k| (0..=n).map(|j| level_probability_unchecked(n, k, j)).collect())
            .collect();
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.rows[k][j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    /// Largest `|sum_j P(k, j) - 1|` over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().copied().collect::<CompensatedSum>().value() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma5Report {
    pub n: usize,
    pub passed: bool,
    pub monotone: bool,
    /// `(k, k', j)` with the smallest `P(k, j) - P(k', j)`.
    pub tightest: (usize, usize, usize),
    pub tightest_margin: f64,
    pub max_row_sum_error: f64,
    /// Largest deviation from enumeration (only computed for `n <= 12`).
    pub max_enumeration_diff: Option<f64>,
}

/// For all `1 <= k <= k' <= n` and `j < k`, checks `P(k, j) >= P(k', j)`,
/// plus the row sums and (for `n <= 12`) agreement with enumeration to
/// `1e-12`.
pub fn lemma5_monotonicity_check(n: usize) -> Result<Lemma5Report> {
    if n == 0 || n > MAX_LEMMA5_N {
        return Err(Error::TooLarge(format!("check needs 1 <= n <= {MAX_LEMMA5_N}")));
    }
    let table = LevelProbabilityTable::new(n)?;
    let mut monotone = true;
    let mut tightest = (1, 1, 0);
    let mut tightest_margin = f64::INFINITY;
    for k in 1..=n {
        for k2 in k + 1..=n {
            for j in 0..k {
                let margin = table.get(k, j) - table.get(k2, j);
                if margin < -ORDER_TOLERANCE * table.get(k, j).max(table.get(k2, j)) {
                    monotone = false;
                }
                if margin < tightest_margin {
                    tightest_margin = margin;
                    tightest = (k, k2, j);
                }
            }
        }
    }
    let max_enumeration_diff = if n <= CROSS_CHECK_N {
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            let enumerated = level_distribution_by_enumeration(n, k)?;
            for (j, e) in enumerated.iter().enumerate() {
                worst = worst.max((e - table.get(k, j)).abs());
            }
        }
        Some(worst)
    } else {
        None
    };
    let max_row_sum_error = table.max_row_sum_error();
    let passed = monotone
        && max_row_sum_error <= 1e-12
        && max_enumeration_diff.is_none_or(|d| d <= 1e-12);
    Ok(Lemma5Report {
        n,
        passed,
        monotone,
        tightest,
        tightest_margin: if tightest_margin.is_finite() { tightest_margin } else { 0.0 },
        max_row_sum_error,
        max_enumeration_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((level_probability(2, 1, 0).unwrap() - 0.25).abs() < 1e-15);
        assert!((level_probability(3, 2, 1).unwrap() - 9.0 / 27.0).abs() < 1e-15);
        for n in [1usize, 2, 5, 30] {
            let p = 1.0 - 1.0 / n as f64;
            assert!((level_probability(n, 0, 0).unwrap() - p.powi(n as i32)).abs() < 1e-15);
        }
        // Both bits flip with probability 1/2 each.
        assert!((level_probability(2, 2, 0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn single_bit_always_flips() {
        assert_eq!(level_probability(1, 1, 0).unwrap(), 1.0);
        assert_eq!(level_probability(1, 0, 1).unwrap(), 1.0);
        assert_eq!(level_probability(1, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range() {
        assert!(level_probability(3, 4, 0).is_err());
        assert!(level_probability(3, 0, 4).is_err());
        assert!(level_probability(0, 0, 0).is_err());
        assert!(lemma5_monotonicity_check(15).is_err());
    }

    #[test]
    fn formula_matches_enumeration() {
        for n in 1..=12 {
            for k in 0..=n {
                let e = level_distribution_by_enumeration(n, k).unwrap();
                for (j, ej) in e.iter().enumerate() {
                    let f = level_probability(n, k, j).unwrap();
                    assert!((f - ej).abs() <= 1e-12, "n={n} k={k} j={j}: {f} vs {ej}");
                }
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        for n in 1..=14 {
            let t = LevelProbabilityTable::new(n).unwrap();
            assert!(t.max_row_sum_error() <= 1e-12, "n={n}");
            assert!((0..=n).all(|k| t.row(k).iter().all(|p| (0.0..=1.0).contains(p))));
        }
    }

    #[test]
    fn monotonicity_holds() {
        for n in 1..=14 {
            let r = lemma5_monotonicity_check(n).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.max_enumeration_diff.is_some(), n <= 12);
        }
    }
}
