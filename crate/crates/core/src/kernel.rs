//! The one-step transition kernel of the random logistic map.
//!
//! Given `X = x`, the next state is `λ·s` with `s = x(1 − x)` and λ drawn
//! from the parameter law `Q`, so
//!
//! ```text
//! p(x, A) = Q({λ : λ·s ∈ A}) = Q(A / s)
//! ```
//!
//! Everything here is closed form: no sampling is involved. The states 0
//! and 1 are rejected because the kernel collapses to a point mass at 0
//! there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::{IntervalSet, ParameterLaw};
use crate::logistic::{StateValue, SupportInterval};
use crate::measure::{bin_index, uniform_edges, EmpiricalMeasure};
use crate::ulam::UlamOperator;

/// Default number of midpoint quadrature nodes per source bin.
pub const DEFAULT_QUADRATURE_NODES: usize = 5;

/// Density of `p(x, ·)` at a point, in inverse state units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TransitionDensityValue(pub f64);

impl TransitionDensityValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

#[inline]
fn spread(x: StateValue) -> Result<f64> {
    let x = x.get();
    if x > 0.0 && x < 1.0 {
        Ok(x * (1.0 - x))
    } else {
        Err(Error::DegenerateState(x))
    }
}

/// `P(λ·s < y)`, with everything at or above 1 counted as below.
#[inline]
pub(crate) fn step_cdf(s: f64, y: f64, law: &ParameterLaw) -> f64 {
    if y >= 1.0 {
        1.0
    } else if y <= 0.0 {
        0.0
    } else {
        law.cdf_below(y / s)
    }
}

#[inline]
fn prob_with_spread(s: f64, a: &IntervalSet, law: &ParameterLaw) -> f64 {
    let p: f64 = a
        .intervals()
        .iter()
        .map(|&(lo, hi)| {
            let up = if hi >= 1.0 { f64::INFINITY } else { hi / s };
            law.mass_in(lo / s, up)
        })
        .sum();
    p.clamp(0.0, 1.0)
}

/// Midpoint-offset quadrature nodes `lo + (k + ½)·h`, `h = (hi − lo)/m`.
pub(crate) fn quadrature_nodes(lo: f64, hi: f64, m: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / m as f64;
    (0..m).map(move |k| lo + (k as f64 + 0.5) * h)
}

/// The interval of possible next states from `x`.
pub fn image_interval(x: StateValue, law: &ParameterLaw) -> Result<SupportInterval> {
    let s = spread(x)?;
    if !law.is_absolutely_continuous() {
        return Err(Error::NotAbsolutelyContinuous(law.to_string()));
    }
    let (a, b) = law.support_hull();
    SupportInterval::new(a * s, b * s)
}

/// `p(x, A)`.
pub fn transition_prob(x: StateValue, a: &IntervalSet, law: &ParameterLaw) -> Result<f64> {
    Ok(prob_with_spread(spread(x)?, a, law))
}

/// Density of `p(x, ·)` at `y`: `q(y/s)/s` for a law with density `q`.
pub fn transition_density(
    x: StateValue,
    y: StateValue,
    law: &ParameterLaw,
) -> Result<TransitionDensityValue> {
    let s = spread(x)?;
    Ok(TransitionDensityValue(law.density(y.get() / s)? / s))
}

/// Calls `f(j, p)` for every bin `j` of `edges` receiving mass `p > 0` from
/// the kernel at `x`. Bins are visited in increasing order.
pub(crate) fn for_each_bin_mass(
    x: f64,
    law: &ParameterLaw,
    edges: &[f64],
    mut f: impl FnMut(usize, f64),
) {
    let n = edges.len() - 1;
    let s = x * (1.0 - x);
    let (lmin, lmax) = law.support_hull();
    let start = bin_index(edges, lmin * s).saturating_sub(1);
    let end = (bin_index(edges, lmax * s) + 1).min(n - 1);
    let mut prev = if start == 0 {
        0.0
    } else {
        step_cdf(s, edges[start], law)
    };
    for j in start..=end {
        let next = if j + 1 == n {
            1.0
        } else {
            step_cdf(s, edges[j + 1], law)
        };
        let p = next - prev;
        if p > 0.0 {
            f(j, p);
        }
        prev = next;
    }
}

/// Binned approximation of `Pμ(A) = ∫ p(x, A) μ(dx)` on `μ`'s own bins.
///
/// Inside each source bin the kernel is averaged over `quadrature_nodes`
/// midpoint nodes, i.e. mass is treated as uniform within a bin.
pub fn push_forward(
    mu: &EmpiricalMeasure,
    law: &ParameterLaw,
    quadrature_nodes_per_bin: usize,
) -> Result<EmpiricalMeasure> {
    if quadrature_nodes_per_bin == 0 {
        return Err(Error::Config("quadrature needs at least one node".into()));
    }
    let edges = mu.edges();
    let mut out = vec![0.0; mu.n_bins()];
    let w = 1.0 / quadrature_nodes_per_bin as f64;
    for (i, &m) in mu.masses().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (lo, hi) = mu.bin(i);
        for x in quadrature_nodes(lo, hi, quadrature_nodes_per_bin) {
            for_each_bin_mass(x, law, edges, |j, p| out[j] += m * w * p);
        }
    }
    EmpiricalMeasure::from_weights(edges.to_vec(), out)
}

/// Approximates `pⁿ(x, A)`.
///
/// The first and last steps use the exact kernel; the `n − 2` steps in
/// between go through an Ulam operator on `grid` uniform bins. Exact for
/// `n = 1`.
pub fn n_step_prob(
    x: StateValue,
    a: &IntervalSet,
    law: &ParameterLaw,
    n: usize,
    grid: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("n_step_prob needs n >= 1".into()));
    }
    let s = spread(x)?;
    if n == 1 {
        return Ok(prob_with_spread(s, a, law));
    }
    let edges = uniform_edges(grid);
    let mut first = vec![0.0; grid];
    for_each_bin_mass(x.get(), law, &edges, |j, p| first[j] += p);
    let mut mu = EmpiricalMeasure::from_weights(edges, first)?;
    if n > 2 {
        let op = UlamOperator::build(law, grid, DEFAULT_QUADRATURE_NODES)?;
        for _ in 0..n - 2 {
            mu = op.apply(&mu)?;
        }
    }
    last_step_prob(&mu, a, law, DEFAULT_QUADRATURE_NODES)
}

/// `Σᵢ μᵢ · avg_{nodes in bin i} p(node, A)`.
pub(crate) fn last_step_prob(
    mu: &EmpiricalMeasure,
    a: &IntervalSet,
    law: &ParameterLaw,
    nodes: usize,
) -> Result<f64> {
    let w = 1.0 / nodes as f64;
    let mut total = 0.0;
    for (i, &m) in mu.masses().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let (lo, hi) = mu.bin(i);
        let avg: f64 = quadrature_nodes(lo, hi, nodes)
            .map(|x| prob_with_spread(x * (1.0 - x), a, law))
            .sum::<f64>()
            * w;
        total += m * avg;
    }
    Ok(total.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPolicy;
    use approx::assert_abs_diff_eq;

    fn sv(x: f64) -> StateValue {
        StateValue::new(x).unwrap()
    }

    fn chaotic() -> ParameterLaw {
        ParameterLaw::uniform(3.87, 4.0).unwrap()
    }

    /// Independent Monte Carlo estimate of p(x, A) from direct λ draws.
    fn mc_prob(x: f64, a: &IntervalSet, law: &ParameterLaw, n: u64, seed: u64) -> f64 {
        let p = SeedPolicy::new(seed);
        let hits = (0..n)
            .filter(|&i| a.contains(law.quantile(p.uniform(i, 0)) * x * (1.0 - x)))
            .count();
        hits as f64 / n as f64
    }

    #[test]
    fn image_interval_examples() {
        let img = image_interval(sv(0.5), &chaotic()).unwrap();
        assert_abs_diff_eq!(img.lo(), 0.9675, epsilon = 1e-15);
        assert_abs_diff_eq!(img.hi(), 1.0, epsilon = 1e-15);
        let img = image_interval(sv(0.1), &chaotic()).unwrap();
        assert_abs_diff_eq!(img.lo(), 0.3483, epsilon = 1e-15);
        assert_abs_diff_eq!(img.hi(), 0.36, epsilon = 1e-15);
        assert!(image_interval(sv(0.0), &chaotic()).is_err());
        assert!(image_interval(sv(1.0), &chaotic()).is_err());
        let two = ParameterLaw::two_point(2.7, 3.0, 0.5).unwrap();
        assert!(image_interval(sv(0.5), &two).is_err());
    }

    #[test]
    fn transition_prob_examples() {
        let law = chaotic();
        let a = IntervalSet::single(0.95, 1.0).unwrap();
        assert_eq!(transition_prob(sv(0.5), &a, &law).unwrap(), 1.0);
        let mc = mc_prob(0.5, &a, &law, 1_000_000, 1);
        assert_eq!(mc, 1.0);

        let low = IntervalSet::single(0.0, 0.9675).unwrap();
        assert_eq!(transition_prob(sv(0.5), &low, &law).unwrap(), 0.0);

        for x in [0.01, 0.3, 0.5, 0.77, 0.99] {
            assert_eq!(
                transition_prob(sv(x), &IntervalSet::full(), &law).unwrap(),
                1.0
            );
            let two = ParameterLaw::two_point(2.7, 4.0, 0.3).unwrap();
            assert_eq!(
                transition_prob(sv(x), &IntervalSet::full(), &two).unwrap(),
                1.0
            );
        }
        assert!(matches!(
            transition_prob(sv(0.0), &a, &law),
            Err(Error::DegenerateState(_))
        ));
    }

    #[test]
    fn two_point_kernel_is_weighted_indicator() {
        let law = ParameterLaw::two_point(2.7, 3.0, 0.25).unwrap();
        // x = 0.5: atoms at 0.675 and 0.75
        let around_first = IntervalSet::single(0.6, 0.7).unwrap();
        let both = IntervalSet::single(0.6, 0.8).unwrap();
        assert_eq!(transition_prob(sv(0.5), &around_first, &law).unwrap(), 0.25);
        assert_eq!(transition_prob(sv(0.5), &both, &law).unwrap(), 1.0);
        let at_one = ParameterLaw::point(4.0).unwrap();
        let top = IntervalSet::single(0.99, 1.0).unwrap();
        assert_eq!(transition_prob(sv(0.5), &top, &at_one).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_agrees_with_monte_carlo() {
        // 100 random (x, A) pairs, 10⁶ λ-draws each
        let law = chaotic();
        let pick = SeedPolicy::new(77);
        let n = 1_000_000;
        for case in 0..100u64 {
            let x = 0.02 + 0.96 * pick.uniform(case, 0);
            let s = x * (1.0 - x);
            // bias the set toward the image so probabilities are nontrivial
            let c = (s * (3.8 + 0.25 * pick.uniform(case, 1))).min(0.98);
            let half = 0.02 * pick.uniform(case, 2);
            let a = IntervalSet::single((c - half).max(0.0), (c + half).min(1.0)).unwrap();
            let exact = transition_prob(sv(x), &a, &law).unwrap();
            let mc = mc_prob(x, &a, &law, n, 1000 + case);
            let tol = 4.0 * (exact * (1.0 - exact) / n as f64).sqrt() + 1e-6;
            assert!((exact - mc).abs() <= tol, "case {case}: {exact} vs {mc}");
        }
    }

    #[test]
    fn density_examples() {
        let law = chaotic();
        let d = transition_density(sv(0.5), sv(0.98), &law).unwrap().get();
        assert_abs_diff_eq!(d, 1.0 / (0.13 * 0.25), epsilon = 1e-9);
        assert_abs_diff_eq!(d, 30.769_230_769, epsilon = 1e-8);
        assert_eq!(
            transition_density(sv(0.5), sv(0.5), &law).unwrap().get(),
            0.0
        );
        let two = ParameterLaw::two_point(2.7, 3.0, 0.5).unwrap();
        assert!(transition_density(sv(0.5), sv(0.7), &two).is_err());

        // finite difference of the kernel CDF reproduces the density
        let h = 1e-6;
        let y = 0.98;
        let fd = (transition_prob(sv(0.5), &IntervalSet::single(y - h, y + h).unwrap(), &law)
            .unwrap())
            / (2.0 * h);
        assert_abs_diff_eq!(fd, d, epsilon = 1e-4);
    }

    #[test]
    fn density_integrates_to_kernel() {
        let law = chaotic();
        let n = 10_000;
        for &(x, lo, hi) in &[
            (0.5, 0.9, 1.0),
            (0.3, 0.8, 0.83),
            (0.1, 0.0, 0.355),
            (0.7, 0.5, 0.9),
        ] {
            // the density jumps at the image ends, so integrate over the overlap only
            let img = image_interval(sv(x), &law).unwrap();
            let (a, b) = (img.lo().max(lo), img.hi().min(hi));
            let h = (b - a) / n as f64;
            let integral: f64 = (0..n)
                .map(|k| {
                    let y = a + (k as f64 + 0.5) * h;
                    transition_density(sv(x), sv(y), &law).unwrap().get() * h
                })
                .sum();
            let p = transition_prob(sv(x), &IntervalSet::single(lo, hi).unwrap(), &law).unwrap();
            assert!((integral - p).abs() <= 1e-6, "x={x}: {integral} vs {p}");
        }
        // over the full image
        let img = image_interval(sv(0.4), &law).unwrap();
        let h = img.len() / n as f64;
        let integral: f64 = (0..n)
            .map(|k| {
                let y = img.lo() + (k as f64 + 0.5) * h;
                transition_density(sv(0.4), sv(y), &law).unwrap().get() * h
            })
            .sum();
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn push_forward_of_point_mass() {
        let law = chaotic();
        let n = 400;
        let mu = EmpiricalMeasure::point_mass(uniform_edges(n), 0.5).unwrap();
        // bin 200 is [0.5, 0.5025): its nodes have x(1-x) just under 1/4
        let out = push_forward(&mu, &law, 1).unwrap();
        assert_abs_diff_eq!(out.total_mass(), 1.0, epsilon = 1e-12);
        let node = 0.5 + 0.5 / n as f64;
        let s = node * (1.0 - node);
        let (lo, hi) = (3.87 * s, 4.0 * s);
        for (j, &m) in out.masses().iter().enumerate() {
            let (a, b) = out.bin(j);
            let expect = ((b.min(hi) - a.max(lo)).max(0.0)) / (hi - lo);
            assert_abs_diff_eq!(m, expect, epsilon = 1e-12);
        }
        // interior bins of the image carry equal mass
        let inner: Vec<f64> = out.masses().iter().copied().filter(|&m| m > 0.0).collect();
        assert!(inner.len() >= 12);
        for w in inner[1..inner.len() - 1].windows(2) {
            assert_abs_diff_eq!(w[0], w[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_is_additive_and_monotone() {
        use proptest::prelude::*;
        let law = chaotic();
        proptest!(|(x in 0.001f64..0.999, c1 in 0.0f64..1.0, c2 in 0.0f64..1.0, c3 in 0.0f64..1.0)| {
            let mut cuts = [c1, c2, c3];
            cuts.sort_by(f64::total_cmp);
            let a = IntervalSet::single(cuts[0], cuts[1]).unwrap();
            let b = IntervalSet::single(cuts[1], cuts[2]).unwrap();
            let ab = a.union(&b);
            let pa = transition_prob(sv(x), &a, &law).unwrap();
            let pb = transition_prob(sv(x), &b, &law).unwrap();
            let pab = transition_prob(sv(x), &ab, &law).unwrap();
            prop_assert!((pab - pa - pb).abs() <= 1e-15);
            prop_assert!(pa <= pab + 1e-15 && pb <= pab + 1e-15);
        });
    }

    #[test]
    fn n_step_examples() {
        let law = chaotic();
        let a = IntervalSet::single(0.3, 0.6).unwrap();
        assert_eq!(
            n_step_prob(sv(0.2), &a, &law, 1, 64).unwrap(),
            transition_prob(sv(0.2), &a, &law).unwrap()
        );
        for n in 1..5 {
            let p = n_step_prob(sv(0.2), &IntervalSet::full(), &law, n, 128).unwrap();
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        }
        assert!(n_step_prob(sv(0.2), &a, &law, 0, 64).is_err());
    }

    fn mc_n_step(x0: f64, a: &IntervalSet, law: &ParameterLaw, steps: u64, n: u64) -> f64 {
        let seeds = SeedPolicy::new(5);
        let hits = (0..n)
            .filter(|&i| {
                let mut x = x0;
                for k in 0..steps {
                    x = law.quantile(seeds.uniform(i, k)) * x * (1.0 - x);
                }
                a.contains(x)
            })
            .count();
        hits as f64 / n as f64
    }

    #[test]
    fn multi_step_prob_matches_monte_carlo() {
        let law = chaotic();
        let a0 = IntervalSet::single(1.0 - 1.0 / 3.87, 0.75).unwrap();
        let n = 1_000_000u64;
        // From 0.5 the orbit passes (0.9675, 1) then (0, 0.126): A0 is out of reach.
        assert_eq!(n_step_prob(sv(0.5), &a0, &law, 2, 2048).unwrap(), 0.0);
        assert_eq!(mc_n_step(0.5, &a0, &law, 2, n), 0.0);
        assert_eq!(n_step_prob(sv(0.5), &a0, &law, 3, 2048).unwrap(), 0.0);

        let p = n_step_prob(sv(0.5), &a0, &law, 4, 2048).unwrap();
        assert!(p > 0.0);
        let mc = mc_n_step(0.5, &a0, &law, 4, n);
        let sigma = (mc * (1.0 - mc) / n as f64).sqrt();
        assert!((p - mc).abs() <= 3.0 * sigma, "{p} vs {mc} (sigma {sigma})");
    }
}
