//! Deterministic logistic-map arithmetic.
//!
//! The map `f(x, λ) = λ·x·(1 − x)` sends `[0, 1]` into `[0, λ/4]`. For
//! `λ > 1` it has the interior fixed point `1 − 1/λ`, and for any `λ` the
//! orbit of a generic point is eventually trapped in
//! `[λ²(4 − λ)/16, λ/4]`. At `λ = 4` the invariant density is the arcsine
//! (Beta(½, ½)) law `1 / (π √(x(1 − x)))`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the state space `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct StateValue(f64);

impl StateValue {
    pub fn new(x: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&x) {
            Ok(Self(x))
        } else {
            Err(Error::StateOutOfRange(x))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// True when the point lies in the open interval `(0, 1)`.
    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }
}

impl TryFrom<f64> for StateValue {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Self::new(x)
    }
}

impl From<StateValue> for f64 {
    fn from(x: StateValue) -> f64 {
        x.0
    }
}

impl fmt::Display for StateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A map parameter in `(0, 4]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LambdaValue(f64);

impl LambdaValue {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda <= 4.0 {
            Ok(Self(lambda))
        } else {
            Err(Error::LambdaOutOfRange(lambda))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for LambdaValue {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        Self::new(x)
    }
}

impl From<LambdaValue> for f64 {
    fn from(x: LambdaValue) -> f64 {
        x.0
    }
}

/// A closed subinterval `[lo, hi]` of `[0, 1]`.
///
/// `lo == hi` is allowed and marks a point support (the `λ = 2` case of
/// [`deterministic_support_interval`]); check it with [`SupportInterval::is_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    lo: f64,
    hi: f64,
}

impl SupportInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidIntervals(format!(
                "support interval needs 0 <= lo < hi <= 1, got ({lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Result<Self> {
        StateValue::new(x)?;
        Ok(Self { lo: x, hi: x })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// One application of the logistic map.
#[inline]
pub fn logistic_step(x: StateValue, lambda: LambdaValue) -> StateValue {
    // λ ≤ 4 and x(1-x) ≤ 1/4 keep the product in [0, 1] even after rounding.
    StateValue(map(x.0, lambda.0))
}

#[inline]
pub(crate) fn map(x: f64, lambda: f64) -> f64 {
    lambda * x * (1.0 - x)
}

/// The orbit `x0, f(x0), …, fⁿ(x0)` (length `n + 1`).
pub fn iterate_deterministic(x0: StateValue, lambda: LambdaValue, n: usize) -> Vec<StateValue> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..n {
        x = logistic_step(x, lambda);
        out.push(x);
    }
    out
}

/// The interior fixed point `1 − 1/λ`.
pub fn fixed_point(lambda: LambdaValue) -> Result<StateValue> {
    let l = lambda.get();
    if l <= 1.0 {
        return Err(Error::NoInteriorFixedPoint(l));
    }
    Ok(StateValue(1.0 - 1.0 / l))
}

/// The trapping interval `[λ²(4 − λ)/16, λ/4]` of the deterministic map.
///
/// At `λ = 2` both ends coincide at ½ and a point support is returned.
pub fn deterministic_support_interval(lambda: LambdaValue) -> SupportInterval {
    let l = lambda.get();
    let lo = l * l * (4.0 - l) / 16.0;
    let hi = l / 4.0;
    if lo >= hi {
        // lo - hi = -λ(λ - 2)²/16, so this only happens at λ = 2 (up to rounding).
        let mid = 0.5 * (lo + hi);
        return SupportInterval { lo: mid, hi: mid };
    }
    SupportInterval { lo, hi }
}

/// Arcsine density `1 / (π √(x(1 − x)))`, invariant for `λ = 4`.
pub fn beta_invariant_density(x: StateValue) -> Result<f64> {
    let x = x.get();
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DensityPole(x));
    }
    Ok(1.0 / (PI * (x * (1.0 - x)).sqrt()))
}

/// Distribution function of the arcsine law, `(2/π) arcsin √x`.
pub fn beta_invariant_cdf(x: StateValue) -> f64 {
    (2.0 / PI) * x.get().sqrt().asin()
}

/// Quantile function of the arcsine law, `sin²(π u / 2)`.
pub fn beta_invariant_quantile(u: f64) -> f64 {
    let s = (0.5 * PI * u.clamp(0.0, 1.0)).sin();
    s * s
}
