//! Exact drift by enumerating all mutation masks.

use std::f64::consts::E;

use crate::ea::{BitString, FitnessOracle};
use crate::error::{Error, Result};
use crate::linear::{LinearFunction, Potential};
use crate::stats::CompensatedSum;

/// Largest length accepted by [`exact_pointwise_drift`] (cost `2^n n`).
pub const MAX_EXACT_N: usize = 20;
const MAX_LEMMA3_N: usize = 12;

/// `E[Delta(x)]` where `Delta(x) = g(x) - g(y)` if `f(y) <= f(x)` and zero
/// otherwise, `y` being a standard-bit-mutation offspring of `x`.
pub fn exact_pointwise_drift(f: &LinearFunction, g: &Potential, x: &BitString) -> Result<f64> {
    let n = f.len();
    x.check_len(n)?;
    if n > MAX_EXACT_N {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_EXACT_N} for enumeration")));
    }
    g.eval(x)?;
    Ok(drift_unchecked(f, g, x))
}

fn drift_unchecked(f: &LinearFunction, g: &Potential, x: &BitString) -> f64 {
    let n = x.len();
    let p = 1.0 / n as f64;
    let mask_probability: Vec<f64> = (0..=n)
        .map(|k| p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .collect();
    let gx = g.value(x);
    let mut total = CompensatedSum::new();
    let mut flips = Vec::with_capacity(n);
    let mut y = x.clone();
    for mask in 1u64..(1u64 << n) {
        flips.clear();
        flips.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        y.flip_all(&flips);
        if f.difference(&y, &flips) <= 0.0 {
            total.add(mask_probability[flips.len()] * (gx - g.value(&y)));
        }
        y.flip_all(&flips);
    }
    total.value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Report {
    pub n: usize,
    pub passed: bool,
    /// Point minimising `drift * 4 e n / g(x)`.
    pub worst_point: BitString,
    pub worst_ratio: f64,
    pub points_checked: usize,
}

/// Checks `E[Delta(x)] >= g(x) / (4 e n)` for the weighted potential at every
/// non-zero point, with no tolerance.
pub fn lemma3_exhaustive_check(f: &LinearFunction) -> Result<Lemma3Report> {
    let n = f.len();
    if n > MAX_LEMMA3_N {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_LEMMA3_N}")));
    }
    let g = Potential::WeightedG;
    let scale = 4.0 * E * n as f64;
    let mut worst: Option<(BitString, f64)> = None;
    let mut passed = true;
    for mask in 1u64..(1u64 << n) {
        let x = BitString::from_mask(n, mask);
        let gx = g.value(&x);
        let drift = drift_unchecked(f, &g, &x);
        if drift < gx / scale {
            passed = false;
        }
        let ratio = drift * scale / gx;
        if worst.as_ref().is_none_or(|(_, r)| ratio < *r) {
            worst = Some((x, ratio));
        }
    }
    let (worst_point, worst_ratio) = worst.expect("n >= 1 gives a non-zero point");
    Ok(Lemma3Report {
        n,
        passed,
        worst_point,
        worst_ratio,
        points_checked: (1usize << n) - 1,
    })
}
