//! Numerical checks of the structural properties of the random logistic
//! chain: minorization on the fixed-point interval, irreducibility,
//! recurrence, the two-map support bound and convergence from different
//! starting laws.
//!
//! These are numerical corroborations of proved statements, not proofs.
//! Every check returns a [`VerificationReport`] with the worst case found,
//! the threshold it was held to, and the grid sizes used.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ensemble::{Ensemble, InitialLaw, DEFAULT_EXP_RATE};
use crate::error::{Error, Result};
use crate::kernel::transition_prob;
use crate::law::{IntervalSet, ParameterLaw};
use crate::logistic::StateValue;
use crate::measure::{bin_index, rebin, tv_distance, EmpiricalMeasure};
use crate::rng::SeedPolicy;
use crate::ulam::UlamOperator;

/// Slack on inequalities evaluated in closed form.
pub const CLOSED_FORM_SLACK: f64 = 1e-12;
/// Slack on the two-map support bound.
pub const SUPPORT_SLACK: f64 = 1e-9;
/// Threshold on pairwise TV between ensembles started from different laws.
pub const CONVERGENCE_TV_THRESHOLD: f64 = 0.02;

/// Upper end `(1 + √5)/4` of the two-map support bound.
pub fn two_map_upper() -> f64 {
    (1.0 + 5f64.sqrt()) / 4.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub kind: String,
    pub grid: BTreeMap<String, f64>,
    /// Worst value observed (minimum ratio, minimum fraction, maximum TV, ...).
    pub worst_case: f64,
    pub threshold: f64,
    pub pass: bool,
    pub runtime_ms: f64,
    pub notes: Vec<String>,
    pub details: Value,
}

impl VerificationReport {
    fn new(claim: &str, started: Instant) -> Self {
        Self {
            claim: claim.to_string(),
            kind: "numerical corroboration".into(),
            grid: BTreeMap::new(),
            worst_case: f64::NAN,
            threshold: f64::NAN,
            pass: false,
            runtime_ms: started.elapsed().as_secs_f64() * 1e3,
            notes: Vec::new(),
            details: Value::Null,
        }
    }

    fn grid(mut self, key: &str, v: impl Into<f64>) -> Self {
        self.grid.insert(key.into(), v.into());
        self
    }

    fn finish(mut self, started: Instant) -> Self {
        self.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        self
    }
}

/// Parameters of the minorization bound on the fixed-point interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorizationConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for MinorizationConfig {
    fn default() -> Self {
        Self {
            lambda_min: 3.87,
            lambda_max: 4.0,
        }
    }
}

impl MinorizationConfig {
    pub fn law(&self) -> Result<ParameterLaw> {
        ParameterLaw::uniform(self.lambda_min, self.lambda_max)
    }

    /// The interval of fixed points `(1 − 1/λ_min, 1 − 1/λ_max)`.
    pub fn a0(&self) -> (f64, f64) {
        (1.0 - 1.0 / self.lambda_min, 1.0 - 1.0 / self.lambda_max)
    }

    pub fn a0_set(&self) -> Result<IntervalSet> {
        let (lo, hi) = self.a0();
        IntervalSet::single(lo, hi)
    }

    /// Length of A₀, computed as `1/λ_min − 1/λ_max`.
    pub fn l1(&self) -> f64 {
        1.0 / self.lambda_min - 1.0 / self.lambda_max
    }

    /// Length of the parameter interval.
    pub fn l2(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }

    /// The constant `4·L₁/L₂`; equals `1/λ_min` when `λ_max = 4`.
    pub fn c(&self) -> f64 {
        4.0 * self.l1() / self.l2()
    }

    /// Normalized Lebesgue measure of `A ∩ A₀`.
    pub fn phi(&self, a: &IntervalSet) -> f64 {
        let (lo, hi) = self.a0();
        a.overlap_len(lo, hi) / self.l1()
    }
}

/// `p(x, A)/φ(A)` and whether `(x, A)` is inside the scope of the bound (x ∈ A₀, A ⊆ A₀)
/// (`x ∈ A₀`, `A ⊆ A₀`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorizationRatio {
    pub ratio: f64,
    pub in_scope: bool,
}

pub fn minorization_ratio(
    cfg: &MinorizationConfig,
    x: f64,
    a: &IntervalSet,
) -> Result<MinorizationRatio> {
    let law = cfg.law()?;
    let (lo, hi) = cfg.a0();
    let phi = cfg.phi(a);
    let p = transition_prob(StateValue::new(x)?, a, &law)?;
    let in_scope = (lo..=hi).contains(&x) && a.is_subset_of(&cfg.a0_set()?);
    Ok(MinorizationRatio {
        ratio: if phi > 0.0 { p / phi } else { f64::INFINITY },
        in_scope,
    })
}

/// Closed-form check of `p(x, A) ≥ c·φ(A)` over `n_x` states in A₀ and
/// `n_a` subintervals of A₀ (plus A₀ itself). Subinterval lengths are
/// log-uniform in `[10⁻⁴|A₀|, |A₀|]`; their placement is drawn from `seed`.
pub fn minorization_check(
    cfg: &MinorizationConfig,
    n_x: usize,
    n_a: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    if n_x < 2 || n_a < 2 {
        return Err(Error::Config(
            "minorization grid needs at least 2x2 points".into(),
        ));
    }
    let law = cfg.law()?;
    let (lo, hi) = cfg.a0();
    let l1 = cfg.l1();
    let c = cfg.c();
    let draws = SeedPolicy::new(seed);

    let mut sets = vec![cfg.a0_set()?];
    for k in 0..n_a as u64 - 1 {
        let len = l1 * 10f64.powf(-4.0 * draws.uniform(k, 0));
        let start = lo + (l1 - len) * draws.uniform(k, 1);
        sets.push(IntervalSet::single(start, (start + len).min(hi))?);
    }

    let mut worst = f64::INFINITY;
    let mut worst_at = (0.0, (0.0, 0.0));
    for i in 0..n_x {
        let x = lo + l1 * i as f64 / (n_x - 1) as f64;
        let xs = StateValue::new(x)?;
        for a in &sets {
            let phi = cfg.phi(a);
            if phi <= 0.0 {
                continue;
            }
            let ratio = transition_prob(xs, a, &law)? / phi;
            if ratio < worst {
                worst = ratio;
                worst_at = (x, a.intervals()[0]);
            }
        }
    }

    let identity_gap = (c - 1.0 / cfg.lambda_min).abs();
    let pass = worst >= c - CLOSED_FORM_SLACK;
    let mut r = VerificationReport::new("minorization", started)
        .grid("n_x", n_x as f64)
        .grid("n_a", n_a as f64);
    r.worst_case = worst;
    r.threshold = c - CLOSED_FORM_SLACK;
    r.pass = pass;
    r.notes = vec![
        format!("A0 = ({lo}, {hi}), L1 = {l1}, L2 = {}", cfg.l2()),
        "p(x,A) = |A ∩ image(x)| / (L2·x(1−x)) and image(x) ⊇ A0 for x in A0".into(),
        "x(1−x) ≤ 1/4 gives p(x,A) ≥ (1/L2)·4·|A| = 4·(L1/L2)·φ(A)".into(),
        format!("c = 4·L1/L2 = {c}; |c − 1/λ_min| = {identity_gap:e}"),
    ];
    r.details = json!({
        "c": c,
        "one_over_lambda_min": 1.0 / cfg.lambda_min,
        "worst_x": worst_at.0,
        "worst_set": [worst_at.1 .0, worst_at.1 .1],
    });
    Ok(r.finish(started))
}

/// Bins of `edges` meeting `target` in a set of positive length.
pub fn target_bins(edges: &[f64], target: &IntervalSet) -> Vec<usize> {
    edges
        .windows(2)
        .enumerate()
        .filter(|(_, w)| target.overlap_len(w[0], w[1]) > 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// Monte Carlo probe of `pⁿ(x0, target) > 0` for some `n ≤ n_max`,
/// optionally cross-checked against the sparsity pattern of an operator.
#[allow(clippy::too_many_arguments)]
pub fn reachability_probe(
    x0: f64,
    target: &IntervalSet,
    law: &ParameterLaw,
    n_max: u64,
    n_paths: usize,
    seed: SeedPolicy,
    operator: Option<&UlamOperator>,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let e = Ensemble::constant(x0, n_paths, seed)?;
    let stats = e.hitting_time_stats(target, law, n_max)?;
    let mc_positive = stats.fraction_reached > 0.0;
    let mut r = VerificationReport::new("reachability", started)
        .grid("n_paths", n_paths as f64)
        .grid("n_max", n_max as f64);
    let mut agree = true;
    let mut op_reach = Value::Null;
    if let Some(op) = operator {
        let bins = target_bins(op.edges(), target);
        let k = op.first_reach(bin_index(op.edges(), x0), &bins, n_max as usize);
        agree = k.is_some() == mc_positive;
        op_reach = json!(k);
        r.grid.insert("operator_bins".into(), op.n_bins() as f64);
        if !agree {
            r.notes
                .push("Monte Carlo and operator positivity disagree".into());
        }
    }
    r.worst_case = stats.fraction_reached;
    r.threshold = 0.0;
    r.pass = mc_positive && agree;
    r.details = json!({
        "x0": x0,
        "target": target.intervals(),
        "fraction_reached": stats.fraction_reached,
        "mean_hitting_time": if stats.mean.is_finite() { json!(stats.mean) } else { Value::Null },
        "max_hitting_time": stats.max,
        "operator_first_reach": op_reach,
    });
    Ok(r.finish(started))
}

/// Draws a point uniformly (by length) from an interval set.
fn uniform_in(set: &IntervalSet, u: f64) -> f64 {
    let mut t = u * set.total_length();
    for &(lo, hi) in set.intervals() {
        if t < hi - lo {
            return lo + t;
        }
        t -= hi - lo;
    }
    let (lo, hi) = set.intervals()[set.intervals().len() - 1];
    0.5 * (lo + hi)
}

/// For each target, starts `n_paths` particles uniformly in it and records
/// the return time to it. Passes iff every path returns within `n_max`.
pub fn recurrence_stats(
    targets: &[IntervalSet],
    law: &ParameterLaw,
    n_paths: usize,
    n_max: u64,
    seed: SeedPolicy,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut per_target = Vec::new();
    let mut worst: f64 = 1.0;
    for (t, target) in targets.iter().enumerate() {
        if !(target.total_length() > 0.0) {
            return Err(Error::InvalidIntervals(
                "recurrence targets need positive length".into(),
            ));
        }
        let sub = seed.derive(t as u64);
        let starts: Vec<f64> = (0..n_paths as u64)
            .map(|i| uniform_in(target, sub.uniform(i, u64::MAX - 1)))
            .collect();
        let e = Ensemble::from_particles(starts, sub)?;
        let stats = e.hitting_time_stats(target, law, n_max)?;
        worst = worst.min(stats.fraction_reached);
        per_target.push(json!({
            "target": target.intervals(),
            "return_fraction": stats.fraction_reached,
            "mean_return_time": stats.mean,
            "max_return_time": stats.max,
        }));
    }
    let mut r = VerificationReport::new("recurrence", started)
        .grid("n_paths", n_paths as f64)
        .grid("n_max", n_max as f64);
    r.worst_case = worst;
    r.threshold = 1.0;
    r.pass = worst == 1.0;
    r.notes.push(format!("law = {law}"));
    r.details = json!({ "targets": per_target });
    Ok(r.finish(started))
}

/// Which behaviour the two-map parameters predict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoMapRegime {
    /// Both parameters at most 1: all mass collapses onto 0.
    Collapse,
    /// `2 < α < β < 1 + √5` and `α ≥ 8/(β(4 − β))`.
    SupportBound,
    /// Neither condition holds; the support bound is still checked.
    ConditionViolated,
}

pub fn two_map_regime(alpha: f64, beta: f64) -> TwoMapRegime {
    if alpha.max(beta) <= 1.0 {
        TwoMapRegime::Collapse
    } else if 2.0 < alpha
        && alpha < beta
        && beta < 1.0 + 5f64.sqrt()
        && alpha >= 8.0 / (beta * (4.0 - beta))
    {
        TwoMapRegime::SupportBound
    } else {
        TwoMapRegime::ConditionViolated
    }
}

/// Runs the two-point law from a uniform start and checks every particle
/// at every step after a burn-in of `n_steps / 2` against
/// `[1/2, (1 + √5)/4]` (or, in the collapse regime, checks that the
/// ensemble has gone to zero).
pub fn two_map_support_check(
    alpha: f64,
    beta: f64,
    weight: f64,
    n_particles: usize,
    n_steps: usize,
    seed: SeedPolicy,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let law = ParameterLaw::two_point(alpha, beta, weight)?;
    let regime = two_map_regime(alpha, beta);
    let mut e = Ensemble::sample_initial(&InitialLaw::Uniform01, n_particles, seed)?;
    let burn_in = n_steps / 2;
    let (lo, hi) = (0.5, two_map_upper());
    let mut worst_violation: f64 = 0.0;
    let mut violations = 0u64;
    for k in 1..=n_steps {
        e.step(&law);
        if k > burn_in && regime != TwoMapRegime::Collapse {
            for &x in e.particles() {
                let v = (lo - x).max(x - hi).max(0.0);
                if v > SUPPORT_SLACK {
                    violations += 1;
                }
                worst_violation = worst_violation.max(v);
            }
        }
    }
    let (min, max) = e
        .particles()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let mut r = VerificationReport::new("two_map_support", started)
        .grid("n_particles", n_particles as f64)
        .grid("n_steps", n_steps as f64)
        .grid("burn_in", burn_in as f64);
    match regime {
        TwoMapRegime::Collapse => {
            r.worst_case = max;
            r.threshold = 1e-6;
            r.pass = max <= 1e-6;
            r.notes.push(
                "both maps contract onto 0; the point mass at 0 is the unique invariant law".into(),
            );
        }
        _ => {
            r.worst_case = worst_violation;
            r.threshold = SUPPORT_SLACK;
            r.pass = violations == 0;
            if regime == TwoMapRegime::ConditionViolated {
                r.notes.push(format!(
                    "parameters ({alpha}, {beta}) violate 2 < α < β < 1+√5, α ≥ 8/(β(4−β)); bound checked anyway"
                ));
            }
        }
    }
    r.details = json!({
        "alpha": alpha,
        "beta": beta,
        "weight_alpha": weight,
        "regime": regime,
        "bound": [lo, hi],
        "violations": violations,
        "final_min": min,
        "final_max": max,
        "clamped": e.clamped(),
    });
    Ok(r.finish(started))
}

/// One starting law in a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub name: String,
    pub law: InitialLaw,
    pub seed: SeedPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub names: Vec<String>,
    pub pairwise_tv: Vec<Vec<f64>>,
    pub tv_to_invariant: Option<Vec<f64>>,
    pub max_pairwise_tv: f64,
    pub histograms: Vec<EmpiricalMeasure>,
}

/// Runs every starting law for `steps` steps and tabulates pairwise TV
/// distances between the `bins`-bin histograms, plus the distance of each
/// to `invariant` (rebinned) when given.
pub fn convergence_matrix(
    runs: &[ConvergenceRun],
    law: &ParameterLaw,
    steps: usize,
    n: usize,
    bins: usize,
    invariant: Option<&EmpiricalMeasure>,
) -> Result<ConvergenceTable> {
    if runs.len() < 2 {
        return Err(Error::Config(
            "convergence study needs at least two laws".into(),
        ));
    }
    let histograms = runs
        .iter()
        .map(|run| {
            let e = Ensemble::sample_initial(&run.law, n, run.seed)?;
            let out = e.run(law, steps, &[steps], bins)?;
            Ok(out.snapshots.into_iter().next().expect("one snapshot").1)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = histograms.len();
    let mut pairwise = vec![vec![0.0; k]; k];
    let mut max_tv: f64 = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            let d = tv_distance(&histograms[i], &histograms[j])?;
            pairwise[i][j] = d;
            pairwise[j][i] = d;
            max_tv = max_tv.max(d);
        }
    }
    let tv_to_invariant = invariant
        .map(|inv| {
            let inv = rebin(inv, histograms[0].edges())?;
            histograms
                .iter()
                .map(|h| tv_distance(h, &inv))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(ConvergenceTable {
        names: runs.iter().map(|r| r.name.clone()).collect(),
        pairwise_tv: pairwise,
        tv_to_invariant,
        max_pairwise_tv: max_tv,
        histograms,
    })
}

/// The seven catalog laws, each with its own derived seed.
pub fn catalog_runs(master: SeedPolicy, exp_rate: f64) -> Vec<ConvergenceRun> {
    InitialLaw::catalog(exp_rate)
        .into_iter()
        .enumerate()
        .map(|(i, (name, law))| ConvergenceRun {
            name: name.to_string(),
            law,
            seed: master.derive(i as u64),
        })
        .collect()
}

pub fn convergence_report(
    table: &ConvergenceTable,
    threshold: f64,
    steps: usize,
    n: usize,
    bins: usize,
) -> VerificationReport {
    let started = Instant::now();
    let mut r = VerificationReport::new("convergence", started)
        .grid("steps", steps as f64)
        .grid("particles", n as f64)
        .grid("bins", bins as f64);
    r.worst_case = table.max_pairwise_tv;
    r.threshold = threshold;
    r.pass = table.max_pairwise_tv <= threshold;
    r.details = json!({
        "names": table.names,
        "pairwise_tv": table.pairwise_tv,
        "tv_to_invariant": table.tv_to_invariant,
    });
    r
}

/// Check families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Minorization,
    Reachability,
    Recurrence,
    TwoMap,
    Convergence,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "minorization" => Suite::Minorization,
            "reachability" => Suite::Reachability,
            "recurrence" => Suite::Recurrence,
            "two-map" | "two_map" => Suite::TwoMap,
            "convergence" => Suite::Convergence,
            "all" => Suite::All,
            other => {
                return Err(Error::Config(format!(
                    "unknown suite `{other}` (expected minorization, reachability, recurrence, two-map, convergence, all)"
                )))
            }
        })
    }
}

/// Sizes for the default suite.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub particles: usize,
    pub steps: usize,
    pub bins: usize,
    pub exp_rate: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            lambda_min: 3.87,
            lambda_max: 4.0,
            particles: 100_000,
            steps: 20,
            bins: 100,
            exp_rate: DEFAULT_EXP_RATE,
        }
    }
}

/// Reachability from 20 evenly scattered starts into 20 random targets of
/// length in `[0.001, 0.01]` centred in `[0.05, 0.95]`.
pub fn default_reachability(
    opts: &SuiteOptions,
    n_paths: usize,
    n_max: u64,
) -> Result<Vec<VerificationReport>> {
    let law = ParameterLaw::uniform(opts.lambda_min, opts.lambda_max)?;
    let op = UlamOperator::build(&law, 512, crate::kernel::DEFAULT_QUADRATURE_NODES)?;
    let seeds = SeedPolicy::new(opts.seed).derive(0x7ea);
    let targets: Vec<IntervalSet> = (0..20u64)
        .map(|k| {
            let len = 0.001 + 0.009 * seeds.uniform(k, 0);
            let c = 0.05 + 0.9 * seeds.uniform(k, 1);
            IntervalSet::single(c - 0.5 * len, c + 0.5 * len)
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for s in 0..20 {
        let x0 = (s as f64 + 0.5) / 20.0;
        for (t, target) in targets.iter().enumerate() {
            let mut r = reachability_probe(
                x0,
                target,
                &law,
                n_max,
                n_paths,
                seeds.derive(1000 + (s * 20 + t) as u64),
                Some(&op),
            )?;
            r.claim = format!("reachability[start={s},target={t}]");
            reports.push(r);
        }
    }
    Ok(reports)
}

/// `Pᵏ` puts positive mass from every bin into every A₀ bin for some small k.
pub fn operator_irreducibility(
    opts: &SuiteOptions,
    n_bins: usize,
    n_max: usize,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let cfg = MinorizationConfig {
        lambda_min: opts.lambda_min,
        lambda_max: opts.lambda_max,
    };
    let op = UlamOperator::build(&cfg.law()?, n_bins, crate::kernel::DEFAULT_QUADRATURE_NODES)?;
    let bins = target_bins(op.edges(), &cfg.a0_set()?);
    let k = op.power_positivity(n_max, &bins);
    let mut r = VerificationReport::new("operator_irreducibility", started)
        .grid("n_bins", n_bins as f64)
        .grid("n_max", n_max as f64);
    r.worst_case = k.map_or(f64::INFINITY, |k| k as f64);
    r.threshold = n_max as f64;
    r.pass = k.is_some();
    r.details = json!({ "first_full_positivity": k, "target_bins": bins });
    Ok(r.finish(started))
}

/// Runs the default check grids for `suite`.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let all = suite == Suite::All;
    let master = SeedPolicy::new(opts.seed);
    let law = ParameterLaw::uniform(opts.lambda_min, opts.lambda_max)?;
    let cfg = MinorizationConfig {
        lambda_min: opts.lambda_min,
        lambda_max: opts.lambda_max,
    };
    let mut reports = Vec::new();
    if all || suite == Suite::Minorization {
        reports.push(minorization_check(&cfg, 200, 200, opts.seed)?);
    }
    if all || suite == Suite::Reachability {
        let mut a0 = reachability_probe(
            0.01,
            &cfg.a0_set()?,
            &law,
            50,
            100_000,
            master.derive(1),
            None,
        )?;
        a0.claim = "reachability[x0=0.01,target=A0]".into();
        reports.push(a0);
        reports.extend(default_reachability(opts, 10_000, 50)?);
        reports.push(operator_irreducibility(opts, 512, 10)?);
    }
    if all || suite == Suite::Recurrence {
        reports.push(recurrence_stats(
            &[cfg.a0_set()?],
            &law,
            10_000,
            10_000,
            master.derive(2),
        )?);
    }
    if all || suite == Suite::TwoMap {
        reports.push(two_map_support_check(
            2.7,
            3.0,
            0.5,
            opts.particles,
            200,
            master.derive(4),
        )?);
    }
    if all || suite == Suite::Convergence {
        let op = UlamOperator::build(&law, 1024, crate::kernel::DEFAULT_QUADRATURE_NODES)?;
        let inv = op.invariant_vector(1e-12, 100_000)?.to_measure(&op)?;
        let runs = catalog_runs(master.derive(5), opts.exp_rate);
        let table = convergence_matrix(
            &runs,
            &law,
            opts.steps,
            opts.particles,
            opts.bins,
            Some(&inv),
        )?;
        reports.push(convergence_report(
            &table,
            CONVERGENCE_TV_THRESHOLD,
            opts.steps,
            opts.particles,
            opts.bins,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minorization_constants() {
        let cfg = MinorizationConfig::default();
        let (lo, hi) = cfg.a0();
        assert_abs_diff_eq!(lo, 0.741602067, epsilon = 1e-9);
        assert_eq!(hi, 0.75);
        assert!((cfg.c() - 1.0 / 3.87).abs() <= 1e-15);
        assert_abs_diff_eq!(cfg.c(), 0.258398, epsilon = 1e-6);
    }

    #[test]
    fn minorization_default_grid_passes() {
        let r = minorization_check(&MinorizationConfig::default(), 200, 200, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.worst_case >= 1.0 / 3.87 - 1e-12);
        assert!(minorization_check(&MinorizationConfig::default(), 1, 5, 1).is_err());
    }

    #[test]
    fn minorization_at_three_quarters() {
        let cfg = MinorizationConfig::default();
        let r = minorization_ratio(&cfg, 0.75, &cfg.a0_set().unwrap()).unwrap();
        assert!(r.in_scope);
        // φ(A0) = 1 and p(0.75, A0) = L1 / (L2 · 3/16)
        assert_abs_diff_eq!(r.ratio, cfg.l1() / (cfg.l2() * 0.1875), epsilon = 1e-12);
        assert!(r.ratio >= cfg.c());
    }

    #[test]
    fn minorization_out_of_scope_is_flagged() {
        let cfg = MinorizationConfig::default();
        let wide = IntervalSet::single(0.5, 0.9).unwrap();
        let r = minorization_ratio(&cfg, 0.745, &wide).unwrap();
        assert!(!r.in_scope);
        let r = minorization_ratio(&cfg, 0.3, &cfg.a0_set().unwrap()).unwrap();
        assert!(!r.in_scope);
        // x = 0.3 maps into (0.8127, 0.84): no mass on A0
        assert_eq!(r.ratio, 0.0);
        assert!(r.ratio < cfg.c());
    }

    #[test]
    fn two_map_regimes() {
        assert_eq!(two_map_regime(2.7, 3.0), TwoMapRegime::SupportBound);
        assert_eq!(two_map_regime(2.7, 2.7), TwoMapRegime::ConditionViolated);
        assert_eq!(two_map_regime(0.3, 0.8), TwoMapRegime::Collapse);
        // 8/(3·1) = 2.667 > 2.5
        assert_eq!(two_map_regime(2.5, 3.0), TwoMapRegime::ConditionViolated);
    }

    #[test]
    fn two_map_checks() {
        let r = two_map_support_check(2.7, 3.0, 0.5, 20_000, 200, SeedPolicy::new(1)).unwrap();
        assert!(r.pass, "{r:?}");
        let r = two_map_support_check(2.7, 2.7, 1.0, 5_000, 100, SeedPolicy::new(1)).unwrap();
        assert!(r.pass);
        assert!(!r.notes.is_empty());
        let r = two_map_support_check(0.4, 0.9, 0.5, 5_000, 400, SeedPolicy::new(1)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn reachability_examples() {
        let law = ParameterLaw::uniform(3.87, 4.0).unwrap();
        let full = IntervalSet::new(vec![(0.0, 1.0)]).unwrap();
        let r = reachability_probe(0.3, &full, &law, 5, 1000, SeedPolicy::new(1), None).unwrap();
        assert_eq!(r.worst_case, 1.0);
        assert_eq!(r.details["max_hitting_time"], 1);

        let a0 = MinorizationConfig::default().a0_set().unwrap();
        let op = UlamOperator::build(&law, 512, 5).unwrap();
        let r =
            reachability_probe(0.01, &a0, &law, 50, 20_000, SeedPolicy::new(2), Some(&op)).unwrap();
        assert!(r.pass, "{r:?}");

        let tiny = IntervalSet::single(0.9495, 0.9505).unwrap();
        let r = reachability_probe(0.2, &tiny, &law, 50, 20_000, SeedPolicy::new(3), Some(&op))
            .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn recurrence_examples() {
        let law = ParameterLaw::uniform(3.87, 4.0).unwrap();
        let r =
            recurrence_stats(&[IntervalSet::full()], &law, 1000, 10, SeedPolicy::new(1)).unwrap();
        assert!(r.pass);
        assert_eq!(r.details["targets"][0]["mean_return_time"], 1.0);
        assert!(
            recurrence_stats(&[IntervalSet::empty()], &law, 10, 10, SeedPolicy::new(1)).is_err()
        );
    }

    #[test]
    fn convergence_examples() {
        let law = ParameterLaw::uniform(3.87, 4.0).unwrap();
        let same = vec![
            ConvergenceRun {
                name: "a".into(),
                law: InitialLaw::Uniform01,
                seed: SeedPolicy::new(3),
            },
            ConvergenceRun {
                name: "b".into(),
                law: InitialLaw::Uniform01,
                seed: SeedPolicy::new(3),
            },
        ];
        let t = convergence_matrix(&same, &law, 20, 10_000, 100, None).unwrap();
        assert_eq!(t.max_pairwise_tv, 0.0);

        let start = catalog_runs(SeedPolicy::new(4), DEFAULT_EXP_RATE);
        let t = convergence_matrix(&start, &law, 0, 10_000, 100, None).unwrap();
        // uniform vs five-atom mix: the atoms occupy five bins
        let i = t.names.iter().position(|n| n == "uniform").unwrap();
        assert!(t.pairwise_tv[0][i] > 0.9);
        assert!(convergence_matrix(&same[..1], &law, 1, 10, 10, None).is_err());
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("two-map".parse::<Suite>().unwrap(), Suite::TwoMap);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
