use std::f64::consts::{E, LN_2};

use crate::error::{invalid, Error, Result};

/// Closed-form runtime bounds for linear functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearBound {
    /// `e n (1 + ln(n / 2))`
    OnemaxUpper,
    /// `e n (1 + ln((2^n - 1) / 2))`
    BinvalUpper,
    /// `e / (e - 2) n ln n`, leading term only.
    LinearUpper139,
    /// `e n ln n`, leading term only.
    OnemaxLowerAsymptotic,
}

impl LinearBound {
    pub const ALL: [LinearBound; 4] = [
        Self::OnemaxUpper,
        Self::BinvalUpper,
        Self::LinearUpper139,
        Self::OnemaxLowerAsymptotic,
    ];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "onemax_upper" => Ok(Self::OnemaxUpper),
            "binval_upper" => Ok(Self::BinvalUpper),
            "linear_upper_139" => Ok(Self::LinearUpper139),
            "onemax_lower_asymptotic" => Ok(Self::OnemaxLowerAsymptotic),
            other => Err(Error::UnknownName(format!("bound {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::OnemaxUpper => "onemax_upper",
            Self::BinvalUpper => "binval_upper",
            Self::LinearUpper139 => "linear_upper_139",
            Self::OnemaxLowerAsymptotic => "onemax_lower_asymptotic",
        }
    }

    /// Whether only the leading term of an asymptotic statement is given.
    pub fn is_asymptotic(&self) -> bool {
        matches!(self, Self::LinearUpper139 | Self::OnemaxLowerAsymptotic)
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let nf = n as f64;
        Ok(match self {
            Self::OnemaxUpper => E * nf * (1.0 + (nf / 2.0).ln()),
            Self::BinvalUpper => {
                // ln((2^n - 1) / 2) without overflow
                let ln_half_range = nf * LN_2 + (-(-nf * LN_2).exp()).ln_1p() - LN_2;
                E * nf * (1.0 + ln_half_range)
            }
            Self::LinearUpper139 => E / (E - 2.0) * nf * nf.ln(),
            Self::OnemaxLowerAsymptotic => E * nf * nf.ln(),
        })
    }
}

/// Looks a bound up by name and evaluates it at `n`.
pub fn bound_catalog(name: &str, n: usize) -> Result<f64> {
    LinearBound::from_name(name)?.value(n)
}
