//! Simulation and analysis of the logistic map with a random parameter,
//! `X_{n+1} = λ_{n+1} X_n (1 − X_n)` with i.i.d. `λ_n`.
//!
//! The crate provides two independent routes to the invariant law:
//!
//! * [`ensemble`]: reproducible parallel Monte Carlo over particle
//!   populations, with counter-based random streams ([`rng`]);
//! * [`ulam`]: a row-stochastic discretization of the transfer operator
//!   built from the closed-form kernel in [`kernel`].
//!
//! [`measure`] holds binned measures and the distances used to compare the
//! two, and [`verify`] bundles numerical checks of minorization,
//! irreducibility, recurrence and convergence.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod kernel;
pub mod law;
pub mod logistic;
pub mod measure;
pub mod rng;
pub mod ulam;
pub mod verify;

pub use ensemble::{Ensemble, HittingStats, InitialLaw, RunOutput};
pub use error::{Error, Result};
pub use kernel::{
    image_interval, n_step_prob, push_forward, transition_density, transition_prob,
    TransitionDensityValue,
};
pub use law::{IntervalSet, ParameterLaw};
pub use logistic::{
    beta_invariant_cdf, beta_invariant_density, deterministic_support_interval, fixed_point,
    iterate_deterministic, logistic_step, LambdaValue, StateValue, SupportInterval,
};
pub use measure::{
    cesaro_average, distance_report, histogram, ks_statistic, rebin, tv_distance, DistanceReport,
    EmpiricalMeasure,
};
pub use rng::SeedPolicy;
pub use ulam::{InvariantVector, UlamOperator};
pub use verify::{MinorizationConfig, VerificationReport};
