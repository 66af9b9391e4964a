use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// A fixed-length bit string that tracks its number of one-bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
    ones: usize,
}

impl BitString {
    /// The all-zeros string of length `n`.
    ///
    /// Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "bit strings have length at least one");
        Self {
            bits: vec![false; n],
            ones: 0,
        }
    }

    pub fn ones(n: usize) -> Self {
        assert!(n >= 1, "bit strings have length at least one");
        Self {
            bits: vec![true; n],
            ones: n,
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("bit strings have length at least one"));
        }
        let ones = bits.iter().filter(|&&b| b).count();
        Ok(Self { bits, ones })
    }

    /// Bit `i` (0-based) is set iff `mask >> i & 1 == 1`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!((1..=64).contains(&n));
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        Self::from_bits(bits).expect("non-empty")
    }

    /// Uniformly random string of length `n`.
    pub fn random(n: usize, rng: &mut Rng) -> Self {
        assert!(n >= 1, "bit strings have length at least one");
        let bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        Self::from_bits(bits).expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.bits[i] != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = &mut self.bits[i];
        *b = !*b;
        if *b {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    pub fn flip_all(&mut self, positions: &[usize]) {
        for &i in positions {
            self.flip(i);
        }
    }

    /// Number of one-bits, `|x|_1`.
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn is_zero(&self) -> bool {
        self.ones == 0
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Indices of the one-bits.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.len(),
            })
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Parses `"0101"`; position 0 is the leftmost character.
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(bits)
    }
}
