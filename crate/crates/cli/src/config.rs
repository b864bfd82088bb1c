//! Experiment configuration: a flat `key = value` file, overridden by flags.
//!
//! Recognised keys (all optional except `seed`):
//!
//! ```text
//! seed        = 42              # u64, mandatory
//! lambda_min  = 3.87            # equal bounds select a point law
//! lambda_max  = 4
//! init        = exponential     # discrete5 discrete3 exponential gamma normal student_t uniform
//! exp_rate    = 1.25
//! particles   = 100000
//! steps       = 20
//! snapshots   = 0, 20           # defaults to the final step
//! bins        = 100             # ulam defaults to 1024
//! nodes       = 5               # quadrature nodes per source bin
//! tol         = 1e-12
//! max_iter    = 100000
//! out         = out
//! threads     = 4
//! ```
//!
//! Blank lines and text after `#` are ignored.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use randlogistic::ensemble::{DEFAULT_EXP_RATE, DEFAULT_PARTICLES, DEFAULT_STEPS};
use randlogistic::kernel::DEFAULT_QUADRATURE_NODES;
use randlogistic::measure::DEFAULT_FIGURE_BINS;
use randlogistic::{Error, InitialLaw, ParameterLaw, Result, SeedPolicy};

pub const DEFAULT_OPERATOR_BINS: usize = 1024;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_INIT: &str = "exponential";

const KEYS: &[&str] = &[
    "seed",
    "lambda_min",
    "lambda_max",
    "init",
    "exp_rate",
    "particles",
    "steps",
    "snapshots",
    "bins",
    "nodes",
    "tol",
    "max_iter",
    "out",
    "threads",
];

/// Unresolved settings; later layers override earlier ones key by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: format!("unknown key `{k}`"),
                });
            }
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Self(map))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn merge(mut self, over: RawConfig) -> Self {
        self.0.extend(over.0);
        self
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("bad value `{v}` for {key}: {e}")))
            })
            .transpose()
    }

    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let seed = self.get::<u64>("seed")?.ok_or_else(|| {
            Error::Config("a seed is required (--seed or `seed =` in the config file)".into())
        })?;
        let steps = self.get("steps")?.unwrap_or(DEFAULT_STEPS);
        let snapshots = match self.0.get("snapshots") {
            Some(list) => list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Config(format!("bad snapshot step `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![steps],
        };
        let cfg = ExperimentConfig {
            seed,
            lambda_min: self.get("lambda_min")?.unwrap_or(3.87),
            lambda_max: self.get("lambda_max")?.unwrap_or(4.0),
            init: self
                .get("init")?
                .unwrap_or_else(|| DEFAULT_INIT.to_string()),
            exp_rate: self.get("exp_rate")?.unwrap_or(DEFAULT_EXP_RATE),
            particles: self.get("particles")?.unwrap_or(DEFAULT_PARTICLES),
            steps,
            snapshots,
            bins: self.get("bins")?,
            nodes: self.get("nodes")?.unwrap_or(DEFAULT_QUADRATURE_NODES),
            tol: self.get("tol")?.unwrap_or(DEFAULT_TOL),
            max_iter: self.get("max_iter")?.unwrap_or(DEFAULT_MAX_ITER),
            out: self.get("out")?.unwrap_or_else(|| PathBuf::from("out")),
            threads: self.get("threads")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub init: String,
    pub exp_rate: f64,
    pub particles: usize,
    pub steps: usize,
    pub snapshots: Vec<usize>,
    pub bins: Option<usize>,
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        self.parameter_law()?;
        self.initial_law()?;
        let fail = |m: String| Err(Error::Config(m));
        if self.particles == 0 {
            return fail("particles must be positive".into());
        }
        if let Some(b) = self.bins {
            if b < 2 {
                return fail(format!("bins must be at least 2, got {b}"));
            }
        }
        if self.nodes == 0 {
            return fail("nodes must be positive".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if self.threads == Some(0) {
            return fail("threads must be positive".into());
        }
        if let Some(&s) = self.snapshots.iter().find(|&&s| s > self.steps) {
            return fail(format!(
                "snapshot step {s} is beyond steps = {}",
                self.steps
            ));
        }
        Ok(())
    }

    /// `U(lambda_min, lambda_max)`, or the point law when the bounds agree.
    pub fn parameter_law(&self) -> Result<ParameterLaw> {
        if self.lambda_min == self.lambda_max {
            ParameterLaw::point(self.lambda_min)
        } else {
            ParameterLaw::uniform(self.lambda_min, self.lambda_max)
        }
    }

    pub fn initial_law(&self) -> Result<InitialLaw> {
        InitialLaw::by_name(&self.init, self.exp_rate).ok_or_else(|| {
            let names: Vec<&str> = InitialLaw::catalog(self.exp_rate)
                .iter()
                .map(|(n, _)| *n)
                .collect();
            Error::Config(format!(
                "unknown initial law `{}` (expected one of {})",
                self.init,
                names.join(", ")
            ))
        })
    }

    pub fn seed_policy(&self) -> SeedPolicy {
        SeedPolicy::new(self.seed)
    }

    pub fn bins_or(&self, default: usize) -> usize {
        self.bins.unwrap_or(default)
    }

    pub fn figure_bins(&self) -> usize {
        self.bins_or(DEFAULT_FIGURE_BINS)
    }

    /// The settings as config-file lines, for output headers. `threads` and
    /// `out` are left out since they do not affect results.
    pub fn provenance(&self) -> Vec<String> {
        let snaps: Vec<String> = self.snapshots.iter().map(|s| s.to_string()).collect();
        let mut lines = vec![
            format!("seed = {}", self.seed),
            format!("lambda_min = {}", self.lambda_min),
            format!("lambda_max = {}", self.lambda_max),
            format!("init = {}", self.init),
            format!("exp_rate = {}", self.exp_rate),
            format!("particles = {}", self.particles),
            format!("steps = {}", self.steps),
            format!("snapshots = {}", snaps.join(", ")),
        ];
        if let Some(b) = self.bins {
            lines.push(format!("bins = {b}"));
        }
        lines.extend([
            format!("nodes = {}", self.nodes),
            format!("tol = {:e}", self.tol),
            format!("max_iter = {}", self.max_iter),
        ]);
        lines
    }
}
