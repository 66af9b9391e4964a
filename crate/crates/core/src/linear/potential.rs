use std::sync::Arc;

use crate::ea::{BitString, PotentialFn};
use crate::error::{invalid, Error, Result};
use crate::linear::LinearFunction;

/// Potential functions on bit strings. Every kind is zero exactly on the
/// all-zeros string.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `sum_i (1 + i/n) x_i`, the weighted distance to the optimum.
    WeightedG,
    /// Weight one on the lower half of the positions, two on the upper half.
    DrosteG,
    /// `ln(1 + sum_{lower half} x_i + c sum_{upper half} x_i)` with `1 < c <= 2`.
    HeYaoLog(f64),
    /// Number of one-bits.
    OneMax,
    /// The fitness function itself.
    Identity(LinearFunction),
}

impl Potential {
    pub fn he_yao(c: f64) -> Result<Self> {
        if !(c > 1.0 && c <= 2.0) {
            return Err(invalid(format!("He-Yao constant must lie in (1, 2], got {c}")));
        }
        Ok(Self::HeYaoLog(c))
    }

    /// Parses `weighted-g`, `droste`, `he-yao[:c]`, `onemax` or `identity`
    /// (the latter needs the fitness function).
    pub fn from_name(name: &str, f: Option<&LinearFunction>) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (lower.as_str(), None),
        };
        match head {
            "weighted-g" | "weightedg" | "g" => Ok(Self::WeightedG),
            "droste" | "droste-g" => Ok(Self::DrosteG),
            "he-yao" | "heyao" | "log" => {
                let c = match arg {
                    Some(a) => a
                        .parse::<f64>()
                        .map_err(|e| invalid(format!("bad He-Yao constant: {e}")))?,
                    None => 2.0,
                };
                Self::he_yao(c)
            }
            "onemax" => Ok(Self::OneMax),
            "identity" | "fitness" => f
                .cloned()
                .map(Self::Identity)
                .ok_or_else(|| invalid("identity potential needs a fitness function")),
            other => Err(Error::UnknownName(format!("potential {other:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::WeightedG => "weighted-g".into(),
            Self::DrosteG => "droste".into(),
            Self::HeYaoLog(c) => format!("he-yao:{c}"),
            Self::OneMax => "onemax".into(),
            Self::Identity(_) => "identity".into(),
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<f64> {
        match self {
            Self::HeYaoLog(c) if !(*c > 1.0 && *c <= 2.0) => {
                return Err(invalid(format!("He-Yao constant must lie in (1, 2], got {c}")))
            }
            Self::Identity(f) => x.check_len(f.len())?,
            _ => {}
        }
        Ok(self.value(x))
    }

    /// Evaluation without parameter checks.
    pub(crate) fn value(&self, x: &BitString) -> f64 {
        let n = x.len();
        let half = n / 2;
        match self {
            Self::WeightedG => x
                .ones_positions()
                .map(|i| 1.0 + (i + 1) as f64 / n as f64)
                .sum(),
            Self::DrosteG => x
                .ones_positions()
                .map(|i| if i < half { 1.0 } else { 2.0 })
                .sum(),
            Self::HeYaoLog(c) => {
                let inner: f64 = x
                    .ones_positions()
                    .map(|i| if i < half { 1.0 } else { *c })
                    .sum();
                inner.ln_1p()
            }
            Self::OneMax => x.count_ones() as f64,
            Self::Identity(f) => f.eval(x).unwrap_or(f64::NAN),
        }
    }

    pub fn as_fn(&self) -> PotentialFn {
        let g = self.clone();
        Arc::new(move |x: &BitString| g.value(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn reference_values() {
        assert_eq!(Potential::WeightedG.eval(&bits("10")).unwrap(), 1.5);
        assert_eq!(Potential::DrosteG.eval(&bits("1001")).unwrap(), 3.0);
        assert_eq!(Potential::he_yao(2.0).unwrap().eval(&bits("0000")).unwrap(), 0.0);
        let v = Potential::he_yao(1.5).unwrap().eval(&bits("1001")).unwrap();
        assert!((v - 3.5f64.ln()).abs() < 1e-15);
        assert_eq!(Potential::OneMax.eval(&bits("0110")).unwrap(), 2.0);
    }

    #[test]
    fn invalid_constant() {
        assert!(Potential::he_yao(1.0).is_err());
        assert!(Potential::he_yao(2.5).is_err());
        assert!(Potential::HeYaoLog(0.5).eval(&bits("1")).is_err());
    }

    #[test]
    fn zero_exactly_at_origin() {
        let f = LinearFunction::binval(5).unwrap();
        let kinds = [
            Potential::WeightedG,
            Potential::DrosteG,
            Potential::he_yao(1.3).unwrap(),
            Potential::OneMax,
            Potential::Identity(f),
        ];
        for g in &kinds {
            for mask in 0..32u64 {
                let x = BitString::from_mask(5, mask);
                let v = g.eval(&x).unwrap();
                assert_eq!(v == 0.0, mask == 0, "{g:?} at {x}");
                assert!(v >= 0.0);
            }
        }
    }

    #[test]
    fn weighted_g_range() {
        let n = 9;
        let all = BitString::ones(n);
        let v = Potential::WeightedG.eval(&all).unwrap();
        assert!(v <= 2.0 * n as f64);
    }

    #[test]
    fn parse_names() {
        assert_eq!(Potential::from_name("he-yao:1.5", None).unwrap(), Potential::HeYaoLog(1.5));
        assert_eq!(Potential::from_name("Droste", None).unwrap(), Potential::DrosteG);
        assert!(Potential::from_name("identity", None).is_err());
        assert!(Potential::from_name("nope", None).is_err());
    }
}
