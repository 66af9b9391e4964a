use std::fmt;

use rand::Rng as _;

use crate::ea::{BitString, FitnessOracle};
use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Largest `n` for which BinVal weights `2^(i-1)` are finite doubles.
pub const MAX_BINVAL_N: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearKind {
    OneMax,
    BinVal,
    General,
}

/// `f(x) = sum_i w_i x_i` with monotone weights `0 < w_1 <= ... <= w_n`.
#[derive(Clone, PartialEq)]
pub struct LinearFunction {
    weights: Vec<f64>,
    kind: LinearKind,
}

impl fmt::Debug for LinearFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LinearKind::OneMax => write!(f, "OneMax({})", self.len()),
            LinearKind::BinVal => write!(f, "BinVal({})", self.len()),
            LinearKind::General => f.debug_tuple("Linear").field(&self.weights).finish(),
        }
    }
}

impl LinearFunction {
    pub fn onemax(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        Ok(Self {
            weights: vec![1.0; n],
            kind: LinearKind::OneMax,
        })
    }

    /// Weights `2^(i-1)`; bit 1 is the least significant.
    pub fn binval(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BINVAL_N {
            return Err(invalid(format!("BinVal needs 1 <= n <= {MAX_BINVAL_N}, got {n}")));
        }
        Ok(Self {
            weights: (0..n).map(|i| 2f64.powi(i as i32)).collect(),
            kind: LinearKind::BinVal,
        })
    }

    /// Arbitrary positive weights, sorted into non-decreasing order.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("a linear function needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("weights must be positive and finite, got {w}")));
        }
        weights.sort_by(f64::total_cmp);
        Ok(Self {
            weights,
            kind: LinearKind::General,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> LinearKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The function with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {c}")));
        }
        Self::from_weights(self.weights.iter().map(|w| w * c).collect())
    }

    pub fn eval(&self, x: &BitString) -> Result<f64> {
        x.check_len(self.len())?;
        Ok(self.value(x))
    }

    fn value(&self, x: &BitString) -> f64 {
        match self.kind {
            LinearKind::OneMax => x.count_ones() as f64,
            _ => x.ones_positions().map(|i| self.weights[i]).sum(),
        }
    }

    /// Exact sign (and approximate magnitude, for BinVal with huge exponent
    /// spreads) of `f(offspring) - f(parent)`.
    fn flip_difference(&self, offspring: &BitString, flipped: &[usize]) -> f64 {
        match self.kind {
            LinearKind::OneMax => flipped
                .iter()
                .map(|&i| if offspring.get(i) { 1.0 } else { -1.0 })
                .sum(),
            // The highest flipped bit outweighs all lower bits together.
            LinearKind::BinVal => {
                let Some(&top) = flipped.iter().max() else {
                    return 0.0;
                };
                let sign = if offspring.get(top) { 1.0 } else { -1.0 };
                let sum: f64 = flipped
                    .iter()
                    .map(|&i| if offspring.get(i) { self.weights[i] } else { -self.weights[i] })
                    .sum();
                if sum * sign > 0.0 {
                    sum
                } else {
                    sign * self.weights[top] * 0.5
                }
            }
            LinearKind::General => flipped
                .iter()
                .map(|&i| if offspring.get(i) { self.weights[i] } else { -self.weights[i] })
                .sum(),
        }
    }

    /// Text form: `n` on the first line, then the weights.
    pub fn to_text(&self) -> String {
        let ws: Vec<String> = self.weights.iter().map(|w| format!("{w:?}")).collect();
        format!("{}\n{}\n", self.len(), ws.join(" "))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or(Error::Parse {
                line: 1,
                message: "missing length".into(),
            })?
            .parse()
            .map_err(|e| Error::Parse {
                line: 1,
                message: format!("bad length: {e}"),
            })?;
        let weights = tokens
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: 2,
                message: format!("bad weight: {e}"),
            })?;
        if weights.len() != n {
            return Err(Error::Parse {
                line: 2,
                message: format!("expected {n} weights, found {}", weights.len()),
            });
        }
        Self::from_weights(weights)
    }
}

impl FitnessOracle for LinearFunction {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        self.value(x)
    }

    fn optimum_value(&self) -> f64 {
        0.0
    }

    fn description(&self) -> String {
        match self.kind {
            LinearKind::OneMax => format!("onemax(n={})", self.len()),
            LinearKind::BinVal => format!("binval(n={})", self.len()),
            LinearKind::General => format!("linear(n={})", self.len()),
        }
    }

    fn difference(&self, offspring: &BitString, flipped: &[usize]) -> f64 {
        self.flip_difference(offspring, flipped)
    }

    // Positive weights: the all-zeros string is the unique optimum.
    fn is_optimal(&self, x: &BitString, _value: f64) -> bool {
        x.is_zero()
    }
}

/// `n` weights drawn uniformly from `(0, 1]`, sorted ascending.
pub fn random_linear(n: usize, rng: &mut Rng) -> Result<LinearFunction> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let weights = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    LinearFunction::from_weights(weights)
}

/// A named family of linear functions, instantiated per run.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSelection {
    OneMax,
    BinVal,
    /// A fresh random instance for every run.
    RandomLinear,
    Fixed(LinearFunction),
}

const WEIGHT_STREAM: u64 = 0x5745_4947_4854;

impl FunctionSelection {
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "onemax" => Ok(Self::OneMax),
            "binval" => Ok(Self::BinVal),
            "random" | "random-linear" | "random_linear" => Ok(Self::RandomLinear),
            other => Err(Error::UnknownName(format!("function {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::OneMax => "onemax",
            Self::BinVal => "binval",
            Self::RandomLinear => "random-linear",
            Self::Fixed(_) => "fixed",
        }
    }

    /// The function used by the run with seed `run_seed`. Random instances
    /// draw their weights from a stream derived from that seed.
    pub fn instantiate(&self, n: usize, run_seed: u64) -> Result<LinearFunction> {
        match self {
            Self::OneMax => LinearFunction::onemax(n),
            Self::BinVal => LinearFunction::binval(n),
            Self::RandomLinear => {
                random_linear(n, &mut rng_from_seed(derive_seed(run_seed, WEIGHT_STREAM)))
            }
            Self::Fixed(f) => {
                if f.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: f.len(),
                    });
                }
                Ok(f.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn reference_evaluations() {
        let om = LinearFunction::onemax(4).unwrap();
        assert_eq!(om.eval(&bits("1011")).unwrap(), 3.0);
        let bv = LinearFunction::binval(3).unwrap();
        assert_eq!(bv.eval(&bits("101")).unwrap(), 5.0);
        let r = random_linear(6, &mut rng_from_seed(1)).unwrap();
        for f in [om.clone(), LinearFunction::binval(4).unwrap(), r.clone()] {
            let z = BitString::zeros(f.len());
            assert_eq!(f.eval(&z).unwrap(), 0.0);
        }
        assert!(matches!(om.eval(&bits("101")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn binval_acceptance_examples() {
        let bv = LinearFunction::binval(4).unwrap();
        let parent = bits("0001");
        // offspring 1100: flips 0, 1, 3; value 3 <= 8
        let y = bits("1100");
        assert!(bv.difference(&y, &[0, 1, 3]) < 0.0);
        // offspring 0011: flip 2; value 12 > 8
        let y = bits("0011");
        assert!(bv.difference(&y, &[2]) > 0.0);
        assert_eq!(bv.evaluate(&parent), 8.0);
    }

    #[test]
    fn binval_sign_is_exact_for_wide_exponent_spread() {
        let n = 200;
        let bv = LinearFunction::binval(n).unwrap();
        let mut parent = BitString::zeros(n);
        parent.flip(150);
        // Drop bit 150, set bits 0..100: still lower.
        let flips: Vec<usize> = (0..100).chain([150]).collect();
        let mut child = parent.clone();
        child.flip_all(&flips);
        assert!(bv.difference(&child, &flips) < 0.0);
        // Reverse direction is an increase.
        let mut back = child.clone();
        back.flip_all(&flips);
        assert!(bv.difference(&back, &flips) > 0.0);
    }

    #[test]
    fn weights_are_sorted_and_validated() {
        let f = LinearFunction::from_weights(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(f.weights(), &[1.0, 2.0, 3.0]);
        assert!(LinearFunction::from_weights(vec![1.0, 0.0]).is_err());
        assert!(LinearFunction::from_weights(vec![1.0, -2.0]).is_err());
        assert!(LinearFunction::from_weights(vec![]).is_err());
        assert!(LinearFunction::binval(0).is_err());
        assert!(LinearFunction::binval(MAX_BINVAL_N + 1).is_err());
    }

    #[test]
    fn random_linear_is_sorted_positive_and_seeded() {
        let a = random_linear(50, &mut rng_from_seed(4)).unwrap();
        let b = random_linear(50, &mut rng_from_seed(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.weights().windows(2).all(|w| w[0] <= w[1]));
        assert!(a.weights().iter().all(|&w| w > 0.0 && w <= 1.0));
    }

    #[test]
    fn largest_weight_mean_matches_order_statistic() {
        // E[max of n uniforms] = n / (n + 1)
        let n = 10;
        let draws = 100_000;
        let mut rng = rng_from_seed(99);
        let samples: Vec<f64> = (0..draws)
            .map(|_| *random_linear(n, &mut rng).unwrap().weights().last().unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let expected = n as f64 / (n as f64 + 1.0);
        // Var of max of n uniforms: n / ((n+1)^2 (n+2))
        let sd = (n as f64 / ((n as f64 + 1.0).powi(2) * (n as f64 + 2.0))).sqrt();
        assert!((mean - expected).abs() < 4.0 * sd / (draws as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn text_round_trip() {
        let f = random_linear(7, &mut rng_from_seed(8)).unwrap();
        assert_eq!(LinearFunction::parse(&f.to_text()).unwrap(), f);
        assert!(LinearFunction::parse("3\n1 2").is_err());
        assert!(LinearFunction::parse("").is_err());
    }

    #[test]
    fn selection_instantiation() {
        let s = FunctionSelection::from_name("random-linear").unwrap();
        assert_eq!(s.instantiate(5, 1).unwrap(), s.instantiate(5, 1).unwrap());
        assert_ne!(s.instantiate(5, 1).unwrap(), s.instantiate(5, 2).unwrap());
        assert!(FunctionSelection::from_name("leadingones").is_err());
        assert_eq!(
            FunctionSelection::BinVal.instantiate(3, 0).unwrap().kind(),
            LinearKind::BinVal
        );
    }
}
