//! Parameter laws for λ and the interval sets the kernel is evaluated on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`ParameterLaw::PiecewiseConstant`] law.
pub const PIECEWISE_MASS_TOL: f64 = 1e-12;

/// Distribution of the random parameter λ, supported in `(0, 4]`.
///
/// Interval endpoints are treated as half-open `[lo, hi)` when atoms are
/// involved; for the absolutely continuous variants the distinction has
/// probability zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterLaw {
    UniformInterval {
        a: f64,
        b: f64,
    },
    /// λ = `alpha` with probability `weight_alpha`, else `beta`.
    TwoPoint {
        alpha: f64,
        beta: f64,
        weight_alpha: f64,
    },
    /// Density `densities[i]` on `[breakpoints[i], breakpoints[i + 1])`.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        densities: Vec<f64>,
    },
}

fn in_lambda_range(l: f64) -> bool {
    l > 0.0 && l <= 4.0
}

impl ParameterLaw {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let law = ParameterLaw::UniformInterval { a, b };
        law.validate()?;
        Ok(law)
    }

    pub fn two_point(alpha: f64, beta: f64, weight_alpha: f64) -> Result<Self> {
        let law = ParameterLaw::TwoPoint {
            alpha,
            beta,
            weight_alpha,
        };
        law.validate()?;
        Ok(law)
    }

    /// Degenerate law: λ is always `lambda`.
    pub fn point(lambda: f64) -> Result<Self> {
        Self::two_point(lambda, lambda, 1.0)
    }

    pub fn piecewise(breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        let law = ParameterLaw::PiecewiseConstant {
            breakpoints,
            densities,
        };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParameterLaw::UniformInterval { a, b } => {
                if !(*a > 0.0 && a < b && *b <= 4.0) {
                    return Err(Error::InvalidLaw(format!(
                        "uniform law needs 0 < a < b <= 4, got ({a}, {b})"
                    )));
                }
            }
            ParameterLaw::TwoPoint {
                alpha,
                beta,
                weight_alpha,
            } => {
                if !in_lambda_range(*alpha) || !in_lambda_range(*beta) {
                    return Err(Error::InvalidLaw(format!(
                        "two-point atoms must lie in (0, 4], got {alpha} and {beta}"
                    )));
                }
                if !(0.0..=1.0).contains(weight_alpha) {
                    return Err(Error::InvalidLaw(format!(
                        "two-point weight must lie in [0, 1], got {weight_alpha}"
                    )));
                }
            }
            ParameterLaw::PiecewiseConstant {
                breakpoints,
                densities,
            } => {
                if breakpoints.len() < 2 || densities.len() + 1 != breakpoints.len() {
                    return Err(Error::InvalidLaw(
                        "piecewise law needs k + 1 breakpoints for k densities (k >= 1)".into(),
                    ));
                }
                if !(breakpoints[0] > 0.0 && breakpoints[breakpoints.len() - 1] <= 4.0) {
                    return Err(Error::InvalidLaw(
                        "piecewise support must lie in (0, 4]".into(),
                    ));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidLaw(
                        "breakpoints must be strictly increasing".into(),
                    ));
                }
                if densities.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
                    return Err(Error::InvalidLaw(
                        "densities must be finite and nonnegative".into(),
                    ));
                }
                let mass: f64 = breakpoints
                    .windows(2)
                    .zip(densities)
                    .map(|(w, d)| (w[1] - w[0]) * d)
                    .sum();
                if (mass - 1.0).abs() > PIECEWISE_MASS_TOL {
                    return Err(Error::InvalidLaw(format!(
                        "piecewise density integrates to {mass}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_absolutely_continuous(&self) -> bool {
        !matches!(self, ParameterLaw::TwoPoint { .. })
    }

    /// Smallest and largest values λ can take.
    pub fn support_hull(&self) -> (f64, f64) {
        match self {
            ParameterLaw::UniformInterval { a, b } => (*a, *b),
            ParameterLaw::TwoPoint {
                alpha,
                beta,
                weight_alpha,
            } => {
                if *weight_alpha == 1.0 {
                    (*alpha, *alpha)
                } else if *weight_alpha == 0.0 {
                    (*beta, *beta)
                } else {
                    (alpha.min(*beta), alpha.max(*beta))
                }
            }
            ParameterLaw::PiecewiseConstant { breakpoints, .. } => {
                (breakpoints[0], breakpoints[breakpoints.len() - 1])
            }
        }
    }

    /// `P(λ < t)`.
    pub fn cdf_below(&self, t: f64) -> f64 {
        match self {
            ParameterLaw::UniformInterval { a, b } => ((t - a) / (b - a)).clamp(0.0, 1.0),
            ParameterLaw::TwoPoint {
                alpha,
                beta,
                weight_alpha,
            } => {
                let mut p = 0.0;
                if *alpha < t {
                    p += weight_alpha;
                }
                if *beta < t {
                    p += 1.0 - weight_alpha;
                }
                p
            }
            ParameterLaw::PiecewiseConstant {
                breakpoints,
                densities,
            } => {
                let mut p = 0.0;
                for (w, d) in breakpoints.windows(2).zip(densities) {
                    if t <= w[0] {
                        break;
                    }
                    p += (t.min(w[1]) - w[0]) * d;
                }
                p.clamp(0.0, 1.0)
            }
        }
    }

    /// `P(lo <= λ < hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match self {
            ParameterLaw::UniformInterval { a, b } => {
                let overlap = hi.min(*b) - lo.max(*a);
                (overlap / (b - a)).clamp(0.0, 1.0)
            }
            _ => (self.cdf_below(hi) - self.cdf_below(lo)).max(0.0),
        }
    }

    /// Density of λ at `t`, if the law has one.
    pub fn density(&self, t: f64) -> Result<f64> {
        match self {
            ParameterLaw::UniformInterval { a, b } => Ok(if *a <= t && t < *b {
                1.0 / (b - a)
            } else {
                0.0
            }),
            ParameterLaw::TwoPoint { .. } => Err(Error::NotAbsolutelyContinuous(self.to_string())),
            ParameterLaw::PiecewiseConstant {
                breakpoints,
                densities,
            } => Ok(breakpoints
                .windows(2)
                .zip(densities)
                .find(|(w, _)| w[0] <= t && t < w[1])
                .map_or(0.0, |(_, d)| *d)),
        }
    }

    /// Inverse distribution function; `u` is a uniform draw in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            ParameterLaw::UniformInterval { a, b } => a + (b - a) * u,
            ParameterLaw::TwoPoint {
                alpha,
                beta,
                weight_alpha,
            } => {
                if u < *weight_alpha {
                    *alpha
                } else {
                    *beta
                }
            }
            ParameterLaw::PiecewiseConstant {
                breakpoints,
                densities,
            } => {
                let mut acc = 0.0;
                for (w, d) in breakpoints.windows(2).zip(densities) {
                    let m = (w[1] - w[0]) * d;
                    if m > 0.0 && u < acc + m {
                        return (w[0] + (u - acc) / d).min(w[1]);
                    }
                    acc += m;
                }
                // u beyond the accumulated mass (rounding): last piece with mass
                breakpoints
                    .windows(2)
                    .zip(densities)
                    .rev()
                    .find(|(_, d)| **d > 0.0)
                    .map_or(breakpoints[breakpoints.len() - 1], |(w, _)| w[1])
            }
        }
    }
}

impl fmt::Display for ParameterLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParameterLaw::UniformInterval { a, b } => write!(f, "uniform({a},{b})"),
            ParameterLaw::TwoPoint { alpha, beta, .. } if alpha == beta => {
                write!(f, "point({alpha})")
            }
            ParameterLaw::TwoPoint {
                alpha,
                beta,
                weight_alpha,
            } => write!(f, "two_point({alpha},{beta};{weight_alpha})"),
            ParameterLaw::PiecewiseConstant {
                breakpoints,
                densities,
            } => {
                write!(f, "piecewise(")?;
                for (i, b) in breakpoints.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{b}")?;
                }
                write!(f, ";")?;
                for (i, d) in densities.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{d}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite disjoint union of subintervals of `[0, 1]`.
///
/// Each piece is the half-open `[lo, hi)`, except that a piece ending at 1
/// also contains 1. Construction sorts the pieces, drops empty ones and
/// merges pieces that touch or overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut pieces: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &pieces {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::InvalidIntervals(format!(
                    "piece ({lo}, {hi}) is not an interval within [0, 1]"
                )));
            }
        }
        pieces.retain(|(lo, hi)| hi > lo);
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    /// The whole state space.
    pub fn full() -> Self {
        Self {
            intervals: vec![(0.0, 1.0)],
        }
    }

    pub fn empty() -> Self {
        Self { intervals: vec![] }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    #[inline]
    pub fn contains(&self, y: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| lo <= y && (y < hi || (hi == 1.0 && y == 1.0)))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut pieces = self.intervals.clone();
        pieces.extend_from_slice(&other.intervals);
        IntervalSet::new(pieces).expect("pieces already validated")
    }

    /// Lebesgue measure of the intersection with `[lo, hi]`.
    pub fn overlap_len(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .all(|&(lo, hi)| other.intervals.iter().any(|&(a, b)| a <= lo && hi <= b))
    }
}
