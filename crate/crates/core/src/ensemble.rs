//! Particle ensembles driven by the random map.
//!
//! Each particle draws its own λ at every step from the counter-based
//! stream `(seed, particle index, step)`, so an ensemble evolves
//! identically whether it is stepped on one thread or many.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::{IntervalSet, ParameterLaw};
use crate::measure::{histogram, EmpiricalMeasure};
use crate::rng::{CounterRng, SeedPolicy, INIT_STEP};

pub const DEFAULT_PARTICLES: usize = 100_000;
pub const DEFAULT_STEPS: usize = 20;
/// Rate of the truncated exponential start used in the published figures.
pub const DEFAULT_EXP_RATE: f64 = 1.25;
/// Attempts allowed per draw in the rejection samplers.
pub const MAX_REJECTION_ATTEMPTS: usize = 100_000;

/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;
/// Smallest positive double.
const ABOVE_ZERO: f64 = 5e-324;

/// Distribution of the initial state, always restricted to `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialLaw {
    DiscreteWeighted {
        support: Vec<f64>,
        weights: Vec<f64>,
    },
    Uniform01,
    TruncatedExponential {
        rate: f64,
    },
    TruncatedGamma {
        shape: f64,
        scale: f64,
    },
    TruncatedNormal {
        mean: f64,
        sd: f64,
    },
    TruncatedStudentT {
        dof: f64,
    },
}

impl InitialLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLaw(msg));
        match self {
            InitialLaw::DiscreteWeighted { support, weights } => {
                if support.is_empty() || support.len() != weights.len() {
                    return bad("discrete law needs one weight per atom".into());
                }
                if support.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                    return bad("discrete atoms must lie in (0, 1)".into());
                }
                if weights.iter().any(|&w| !(w >= 0.0)) {
                    return bad("discrete weights must be nonnegative".into());
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("discrete weights sum to {total}"));
                }
            }
            InitialLaw::Uniform01 => {}
            InitialLaw::TruncatedExponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return bad(format!("exponential rate must be positive, got {rate}"));
                }
            }
            InitialLaw::TruncatedGamma { shape, scale } => {
                if !(*shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()) {
                    return bad(format!(
                        "gamma needs positive shape and scale, got {shape}, {scale}"
                    ));
                }
            }
            InitialLaw::TruncatedNormal { mean, sd } => {
                if !(mean.is_finite() && *sd > 0.0 && sd.is_finite()) {
                    return bad(format!(
                        "normal needs finite mean and positive sd, got {mean}, {sd}"
                    ));
                }
            }
            InitialLaw::TruncatedStudentT { dof } => {
                if !(*dof > 0.0 && dof.is_finite()) {
                    return bad(format!("t distribution needs positive dof, got {dof}"));
                }
            }
        }
        Ok(())
    }

    /// The seven starting distributions of the convergence study, in order:
    /// five-atom discrete, three-atom discrete, exponential, gamma, normal,
    /// Student-t and uniform.
    pub fn catalog(exp_rate: f64) -> Vec<(&'static str, InitialLaw)> {
        vec![
            (
                "discrete5",
                InitialLaw::DiscreteWeighted {
                    support: vec![0.11, 0.33, 0.55, 0.6, 0.78],
                    // the listed probabilities total 0.998
                    weights: [0.196, 0.140, 0.233, 0.322, 0.107]
                        .iter()
                        .map(|w| w / 0.998)
                        .collect(),
                },
            ),
            (
                "discrete3",
                InitialLaw::DiscreteWeighted {
                    support: vec![0.25, 0.5, 0.75],
                    weights: vec![1.0 / 3.0; 3],
                },
            ),
            (
                "exponential",
                InitialLaw::TruncatedExponential { rate: exp_rate },
            ),
            (
                "gamma",
                InitialLaw::TruncatedGamma {
                    shape: 3.0,
                    scale: 1.0,
                },
            ),
            ("normal", InitialLaw::TruncatedNormal { mean: 0.5, sd: 0.3 }),
            ("student_t", InitialLaw::TruncatedStudentT { dof: 1.0 }),
            ("uniform", InitialLaw::Uniform01),
        ]
    }

    pub fn by_name(name: &str, exp_rate: f64) -> Option<InitialLaw> {
        Self::catalog(exp_rate)
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, l)| l)
    }

    /// Closed-form distribution function, where one exists.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        let x = x.clamp(0.0, 1.0);
        match self {
            InitialLaw::Uniform01 => Some(x),
            InitialLaw::TruncatedExponential { rate } => {
                Some((-rate * x).exp_m1() / (-rate).exp_m1())
            }
            InitialLaw::DiscreteWeighted { support, weights } => Some(
                support
                    .iter()
                    .zip(weights)
                    .filter(|(s, _)| **s <= x)
                    .map(|(_, w)| w)
                    .sum(),
            ),
            _ => None,
        }
    }

    fn sample(&self, rng: &mut CounterRng) -> Result<f64> {
        match self {
            InitialLaw::Uniform01 => Ok(rng.next_open01()),
            InitialLaw::TruncatedExponential { rate } => {
                let u = rng.next_open01();
                let x = -(u * (-rate).exp_m1()).ln_1p() / rate;
                Ok(x.clamp(ABOVE_ZERO, BELOW_ONE))
            }
            InitialLaw::DiscreteWeighted { support, weights } => {
                let u = rng.next_open01();
                let mut acc = 0.0;
                for (s, w) in support.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return Ok(*s);
                    }
                }
                Ok(*support.last().expect("validated nonempty"))
            }
            InitialLaw::TruncatedGamma { shape, scale } => {
                let d = Gamma::new(*shape, *scale)
                    .map_err(|e| Error::InvalidLaw(format!("gamma: {e}")))?;
                reject_into_unit(&d, rng, "truncated gamma")
            }
            InitialLaw::TruncatedNormal { mean, sd } => {
                let d = Normal::new(*mean, *sd)
                    .map_err(|e| Error::InvalidLaw(format!("normal: {e}")))?;
                reject_into_unit(&d, rng, "truncated normal")
            }
            InitialLaw::TruncatedStudentT { dof } => {
                let d = StudentT::new(*dof)
                    .map_err(|e| Error::InvalidLaw(format!("student t: {e}")))?;
                reject_into_unit(&d, rng, "truncated student t")
            }
        }
    }
}

fn reject_into_unit<D: Distribution<f64>>(d: &D, rng: &mut CounterRng, law: &str) -> Result<f64> {
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let x = rng.sample(d);
        if x > 0.0 && x < 1.0 {
            return Ok(x);
        }
    }
    Err(Error::RejectionCap {
        law: law.to_string(),
        attempts: MAX_REJECTION_ATTEMPTS,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    particles: Vec<f64>,
    step: u64,
    seed: SeedPolicy,
    law_tag: String,
    clamped: u64,
}

/// First-entry statistics for a target set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingStats {
    /// Mean entry step among particles that reached the target.
    pub mean: f64,
    pub max: u64,
    pub fraction_reached: f64,
    pub n_reached: u64,
    pub n_particles: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub ensemble: Ensemble,
    /// `(steps since the start of the run, histogram)` in request order.
    pub snapshots: Vec<(usize, EmpiricalMeasure)>,
    /// Particles clamped back into `(0, 1)` during this run.
    pub clamped: u64,
}

/// Applies one step of the map; returns the new state and whether it had
/// to be clamped back into `(0, 1)`.
#[inline]
fn advance(x: f64, lambda: f64) -> (f64, bool) {
    let y = lambda * x * (1.0 - x);
    if y <= 0.0 {
        (ABOVE_ZERO, true)
    } else if y >= 1.0 {
        (BELOW_ONE, true)
    } else {
        (y, false)
    }
}

impl Ensemble {
    /// `n` independent draws from `law`; step counter starts at 0.
    pub fn sample_initial(law: &InitialLaw, n: usize, seed: SeedPolicy) -> Result<Self> {
        law.validate()?;
        if n == 0 {
            return Err(Error::Config("ensemble needs at least one particle".into()));
        }
        let particles = (0..n as u64)
            .into_par_iter()
            .map(|i| law.sample(&mut seed.stream(i, INIT_STEP)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            particles,
            step: 0,
            seed,
            law_tag: String::new(),
            clamped: 0,
        })
    }

    /// `n` particles all at `x0`.
    pub fn constant(x0: f64, n: usize, seed: SeedPolicy) -> Result<Self> {
        Self::from_particles(vec![x0; n], seed)
    }

    pub fn from_particles(particles: Vec<f64>, seed: SeedPolicy) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::Config("ensemble needs at least one particle".into()));
        }
        if let Some(&x) = particles.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::StateOutOfRange(x));
        }
        Ok(Self {
            particles,
            step: 0,
            seed,
            law_tag: String::new(),
            clamped: 0,
        })
    }

    pub fn particles(&self) -> &[f64] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn seed(&self) -> SeedPolicy {
        self.seed
    }

    /// Description of the parameter law used for the latest step.
    pub fn law_tag(&self) -> &str {
        &self.law_tag
    }

    /// Total number of clamped particle updates so far.
    pub fn clamped(&self) -> u64 {
        self.clamped
    }

    pub fn histogram(&self, n_bins: usize) -> Result<EmpiricalMeasure> {
        histogram(self, n_bins)
    }

    /// One step: each particle `x` becomes `λ·x(1 − x)` with its own λ.
    pub fn step(&mut self, law: &ParameterLaw) -> u64 {
        let step = self.step;
        let seed = self.seed;
        let clamped: u64 = self
            .particles
            .par_iter_mut()
            .enumerate()
            .map(|(i, x)| {
                let lambda = law.quantile(seed.uniform(i as u64, step));
                let (y, c) = advance(*x, lambda);
                *x = y;
                c as u64
            })
            .sum();
        self.step += 1;
        self.clamped += clamped;
        let tag = law.to_string();
        if self.law_tag != tag {
            self.law_tag = tag;
        }
        clamped
    }

    /// Applies `n_steps` steps, recording a `n_bins` histogram after each
    /// step listed in `snapshot_at` (0 records the starting state).
    pub fn run(
        mut self,
        law: &ParameterLaw,
        n_steps: usize,
        snapshot_at: &[usize],
        n_bins: usize,
    ) -> Result<RunOutput> {
        law.validate()?;
        if let Some(&bad) = snapshot_at.iter().find(|&&s| s > n_steps) {
            return Err(Error::Config(format!(
                "snapshot step {bad} is beyond the run length {n_steps}"
            )));
        }
        let wanted = |k: usize| snapshot_at.contains(&k);
        let mut by_step: Vec<Option<EmpiricalMeasure>> = Vec::with_capacity(n_steps + 1);
        let mut clamped = 0;
        for k in 0..=n_steps {
            if k > 0 {
                clamped += self.step(law);
            }
            by_step.push(if wanted(k) {
                Some(self.histogram(n_bins)?)
            } else {
                None
            });
        }
        let snapshots = snapshot_at
            .iter()
            .map(|&k| (k, by_step[k].clone().expect("recorded above")))
            .collect();
        Ok(RunOutput {
            ensemble: self,
            snapshots,
            clamped,
        })
    }

    /// First entry times `inf{n ≥ 1 : Xₙ ∈ target}` from the current state,
    /// capped at `max_steps`. The ensemble itself is not advanced.
    pub fn hitting_time_stats(
        &self,
        target: &IntervalSet,
        law: &ParameterLaw,
        max_steps: u64,
    ) -> Result<HittingStats> {
        if !(target.total_length() > 0.0) {
            return Err(Error::InvalidIntervals("target has zero length".into()));
        }
        let seed = self.seed;
        let start = self.step;
        let times: Vec<Option<u64>> = self
            .particles
            .par_iter()
            .enumerate()
            .map(|(i, &x0)| {
                let mut x = x0;
                for n in 1..=max_steps {
                    let lambda = law.quantile(seed.uniform(i as u64, start + n - 1));
                    x = advance(x, lambda).0;
                    if target.contains(x) {
                        return Some(n);
                    }
                }
                None
            })
            .collect();
        let reached: Vec<u64> = times.iter().flatten().copied().collect();
        let n_reached = reached.len() as u64;
        let mean = if reached.is_empty() {
            f64::NAN
        } else {
            reached.iter().sum::<u64>() as f64 / n_reached as f64
        };
        Ok(HittingStats {
            mean,
            max: reached.iter().copied().max().unwrap_or(0),
            fraction_reached: n_reached as f64 / self.len() as f64,
            n_reached,
            n_particles: self.len() as u64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::transition_prob;
    use crate::logistic::{iterate_deterministic, LambdaValue, StateValue};
    use crate::measure::ks_statistic;

    fn chaotic() -> ParameterLaw {
        ParameterLaw::uniform(3.87, 4.0).unwrap()
    }

    fn samples(law: &InitialLaw, n: usize, seed: u64) -> Vec<f64> {
        Ensemble::sample_initial(law, n, SeedPolicy::new(seed))
            .unwrap()
            .particles()
            .to_vec()
    }

    /// KS distance between raw samples and a distribution function.
    fn ks_samples(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        let mut xs = xs.to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn discrete_frequencies_match_weights() {
        let (_, law) = &InitialLaw::catalog(DEFAULT_EXP_RATE)[0];
        let n = 100_000;
        let xs = samples(law, n, 11);
        let InitialLaw::DiscreteWeighted { support, weights } = law else {
            unreachable!()
        };
        for (s, w) in support.iter().zip(weights) {
            let f = xs.iter().filter(|&&x| x == *s).count() as f64 / n as f64;
            assert!(
                (f - w).abs() <= 4.0 * (w / n as f64).sqrt(),
                "{s}: {f} vs {w}"
            );
        }
    }

    #[test]
    fn uniform_mean() {
        let xs = samples(&InitialLaw::Uniform01, 100_000, 3);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.005);
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn truncated_exponential_matches_closed_form_cdf() {
        let law = InitialLaw::TruncatedExponential { rate: 1.25 };
        let xs = samples(&law, 100_000, 4);
        let oracle = |x: f64| (1.0 - (-1.25 * x).exp()) / (1.0 - (-1.25f64).exp());
        assert!(ks_samples(&xs, oracle) <= 0.01);
        assert!((law.cdf(0.3).unwrap() - oracle(0.3)).abs() < 1e-14);
    }

    #[test]
    fn rejection_samplers_stay_in_unit_interval() {
        for (name, law) in InitialLaw::catalog(DEFAULT_EXP_RATE) {
            let xs = samples(&law, 20_000, 5);
            assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0), "{name}");
        }
        // truncated normal(0.5, 0.3) is symmetric about 0.5
        let xs = samples(
            &InitialLaw::TruncatedNormal { mean: 0.5, sd: 0.3 },
            100_000,
            6,
        );
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.005);
        // truncated Cauchy on (0,1): P(X < x) = atan(x) / atan(1)
        let xs = samples(&InitialLaw::TruncatedStudentT { dof: 1.0 }, 100_000, 7);
        assert!(ks_samples(&xs, |x| x.atan() / 1f64.atan()) <= 0.01);
        // truncated gamma(3, 1): density ∝ x² e^{-x}
        let xs = samples(
            &InitialLaw::TruncatedGamma {
                shape: 3.0,
                scale: 1.0,
            },
            100_000,
            8,
        );
        let g = |x: f64| 1.0 - (-x).exp() * (1.0 + x + 0.5 * x * x);
        assert!(ks_samples(&xs, |x| g(x) / g(1.0)) <= 0.01);
    }

    #[test]
    fn invalid_initial_laws() {
        assert!(InitialLaw::TruncatedExponential { rate: -1.0 }
            .validate()
            .is_err());
        assert!(InitialLaw::DiscreteWeighted {
            support: vec![0.2, 1.2],
            weights: vec![0.5, 0.5]
        }
        .validate()
        .is_err());
        assert!(InitialLaw::DiscreteWeighted {
            support: vec![0.2, 0.4],
            weights: vec![0.5, 0.6]
        }
        .validate()
        .is_err());
        assert!(Ensemble::sample_initial(&InitialLaw::Uniform01, 0, SeedPolicy::new(1)).is_err());
        // all mass far outside (0, 1): the rejection cap trips
        let far = InitialLaw::TruncatedNormal {
            mean: 100.0,
            sd: 0.1,
        };
        assert!(matches!(
            Ensemble::sample_initial(&far, 1, SeedPolicy::new(1)),
            Err(Error::RejectionCap { .. })
        ));
    }

    #[test]
    fn one_step_from_half_lands_in_image() {
        let mut e = Ensemble::constant(0.5, 10_000, SeedPolicy::new(1)).unwrap();
        e.step(&chaotic());
        assert_eq!(e.step_count(), 1);
        assert!(e.particles().iter().all(|&x| x > 0.9675 && x <= 1.0));
    }

    #[test]
    fn point_law_reproduces_deterministic_orbit() {
        let law = ParameterLaw::point(3.9).unwrap();
        let mut e = Ensemble::from_particles(vec![0.2, 0.37, 0.81], SeedPolicy::new(9)).unwrap();
        let orbits: Vec<Vec<StateValue>> = e
            .particles()
            .iter()
            .map(|&x| {
                iterate_deterministic(
                    StateValue::new(x).unwrap(),
                    LambdaValue::new(3.9).unwrap(),
                    8,
                )
            })
            .collect();
        for k in 1..=8 {
            e.step(&law);
            for (p, orbit) in e.particles().iter().zip(&orbits) {
                assert_eq!(*p, orbit[k].get());
            }
        }
    }

    #[test]
    fn one_step_cdf_matches_kernel() {
        let x = 0.3;
        let n = 100_000;
        let mut e = Ensemble::constant(x, n, SeedPolicy::new(21)).unwrap();
        let law = chaotic();
        e.step(&law);
        let xs = StateValue::new(x).unwrap();
        let ks = ks_samples(e.particles(), |y| {
            transition_prob(xs, &IntervalSet::single(0.0, y.min(1.0)).unwrap(), &law).unwrap()
        });
        assert!(ks <= 4.0 / (n as f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let law = chaotic();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    let e = Ensemble::sample_initial(
                        &InitialLaw::Uniform01,
                        50_000,
                        SeedPolicy::new(42),
                    )
                    .unwrap();
                    e.run(&law, 20, &[20], 100).unwrap()
                })
        };
        let one = run(1);
        let eight = run(8);
        assert_eq!(one.ensemble.particles(), eight.ensemble.particles());
        assert_eq!(one.snapshots[0].1, eight.snapshots[0].1);
    }

    #[test]
    fn run_edge_cases() {
        let e = Ensemble::sample_initial(&InitialLaw::Uniform01, 1000, SeedPolicy::new(2)).unwrap();
        let out = e.clone().run(&chaotic(), 0, &[0], 10).unwrap();
        assert_eq!(out.ensemble, e);
        assert!(e.clone().run(&chaotic(), 5, &[6], 10).is_err());
        let out = e.run(&chaotic(), 3, &[3, 1], 10).unwrap();
        assert_eq!(out.snapshots[0].0, 3);
        assert_eq!(out.snapshots[1].0, 1);
    }

    #[test]
    fn bimodal_shape_after_twenty_steps() {
        let e =
            Ensemble::sample_initial(&InitialLaw::Uniform01, 100_000, SeedPolicy::new(8)).unwrap();
        let out = e.run(&chaotic(), 20, &[20], 100).unwrap();
        let h = &out.snapshots[0].1;
        let m = h.masses();
        // interior local maxima of a 5-bin moving average
        let smooth: Vec<f64> = (2..98)
            .map(|i| m[i - 2..=i + 2].iter().sum::<f64>() / 5.0)
            .collect();
        let peaks: Vec<usize> = (1..smooth.len() - 1)
            .filter(|&i| {
                smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1] && smooth[i] > 0.012
            })
            .collect();
        assert!(peaks.len() >= 2, "peaks at {peaks:?}");
        // mass thins toward both ends instead of piling up in a pole
        let left_peak = m[..20].iter().copied().fold(0.0, f64::max);
        let right_peak = m[80..].iter().copied().fold(0.0, f64::max);
        assert!(m[0] < 0.5 * left_peak && m[99] < 0.5 * right_peak, "{m:?}");
    }

    #[test]
    fn hitting_times() {
        let law = chaotic();
        let e =
            Ensemble::sample_initial(&InitialLaw::Uniform01, 10_000, SeedPolicy::new(3)).unwrap();
        let full = IntervalSet::new(vec![(0.0, 1.0)]).unwrap();
        let s = e.hitting_time_stats(&full, &law, 10).unwrap();
        assert_eq!(s.fraction_reached, 1.0);
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.max, 1);

        let a0 = IntervalSet::single(1.0 - 1.0 / 3.87, 0.75).unwrap();
        // A0 carries about 0.75% of the invariant mass, so entry takes a few hundred steps
        let s = e.hitting_time_stats(&a0, &law, 10_000).unwrap();
        assert_eq!(s.fraction_reached, 1.0);
        assert!(s.mean > 50.0 && s.mean < 1000.0, "{}", s.mean);

        let band = IntervalSet::single(0.9, 0.95).unwrap();
        let s = e.hitting_time_stats(&band, &law, 100).unwrap();
        assert!(s.mean.is_finite() && s.mean < 100.0);
        assert!(e
            .hitting_time_stats(&IntervalSet::empty(), &law, 10)
            .is_err());
    }

    #[test]
    fn histogram_via_ensemble() {
        let e = Ensemble::constant(0.5, 100, SeedPolicy::new(1)).unwrap();
        let h = e.histogram(100).unwrap();
        assert_eq!(h.masses()[50], 1.0);
        assert!(e.histogram(1).is_err());
        let u = Ensemble::sample_initial(&InitialLaw::Uniform01, 1_000_000, SeedPolicy::new(4))
            .unwrap();
        let h = u.histogram(10).unwrap();
        assert!(h.masses().iter().all(|m| (m - 0.1).abs() < 0.005));
        assert!(ks_statistic(&h, |x| x) < 0.005);
    }
}
