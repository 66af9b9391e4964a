use crate::error::{invalid, Result};

/// Hypotheses of the multiplicative drift theorem.
///
/// `delta` is the drift factor, `s0` the initial potential and `smin` the
/// smallest positive value the potential can take.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    delta: f64,
    s0: f64,
    smin: f64,
}

impl BoundSpec {
    pub fn new(delta: f64, s0: f64, smin: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("drift factor must be positive, got {delta}")));
        }
        if !(smin > 0.0 && smin.is_finite()) {
            return Err(invalid(format!("minimum potential must be positive, got {smin}")));
        }
        if !(s0 >= smin && s0.is_finite()) {
            return Err(invalid(format!("initial potential {s0} is below the minimum {smin}")));
        }
        Ok(Self { delta, s0, smin })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn smin(&self) -> f64 {
        self.smin
    }
}

/// `(1 + ln(s0 / smin)) / delta`, the multiplicative drift bound on `E[T]`.
pub fn multiplicative_bound(spec: &BoundSpec) -> f64 {
    (1.0 + (spec.s0 / spec.smin).ln()) / spec.delta
}

/// `x0 / delta`, the additive drift bound on `E[T]`.
pub fn additive_bound(delta: f64, x0: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("drift must be positive, got {delta}")));
    }
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(invalid(format!("initial potential must be positive, got {x0}")));
    }
    Ok(x0 / delta)
}
