use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use randlogistic::verify::{run_suite, Suite, SuiteOptions};
use randlogistic::{EmpiricalMeasure, Ensemble, Error, UlamOperator, VerificationReport};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, DEFAULT_OPERATOR_BINS};

/// Raised when a verification check fails; maps to exit code 1.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_measure(path: &Path, mu: &EmpiricalMeasure, comments: &[String]) -> Result<()> {
    let mut w = create(path)?;
    mu.write_csv(&mut w, comments)?;
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn config_json(cfg: &ExperimentConfig) -> Value {
    let lines = cfg.provenance();
    let map: BTreeMap<&str, &str> = lines.iter().filter_map(|l| l.split_once(" = ")).collect();
    json!(map)
}

fn headed(command: &str, cfg: &ExperimentConfig, extra: &[String]) -> Vec<String> {
    let mut lines = vec![format!("randlogistic {command}")];
    lines.extend(cfg.provenance());
    lines.extend_from_slice(extra);
    lines
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<()> {
    let law = cfg.parameter_law()?;
    let init = cfg.initial_law()?;
    let bins = cfg.figure_bins();
    let e = Ensemble::sample_initial(&init, cfg.particles, cfg.seed_policy())?;
    let run = e.run(&law, cfg.steps, &cfg.snapshots, bins)?;

    let mut snaps = Vec::new();
    for (step, h) in &run.snapshots {
        let name = format!("histogram_step_{step:04}.csv");
        let extra = [format!("lambda_law = {law}"), format!("step = {step}")];
        write_measure(&cfg.out.join(&name), h, &headed("simulate", cfg, &extra))?;
        snaps.push(json!({ "step": step, "file": name, "mean": h.mean() }));
    }
    let summary = json!({
        "command": "simulate",
        "config": config_json(cfg),
        "lambda_law": law.to_string(),
        "initial_law": init,
        "bins": bins,
        "snapshots": snaps,
        "clamped": run.clamped,
    });
    write_json(&cfg.out.join("summary.json"), &summary)?;
    println!(
        "wrote {} histogram(s) and summary.json to {} ({} clamped updates)",
        run.snapshots.len(),
        cfg.out.display(),
        run.clamped
    );
    Ok(())
}

pub fn ulam(cfg: &ExperimentConfig, identity: bool) -> Result<()> {
    let bins = cfg.bins_or(DEFAULT_OPERATOR_BINS);
    let op = if identity {
        UlamOperator::identity(bins)
    } else {
        UlamOperator::build(&cfg.parameter_law()?, bins, cfg.nodes)?
    };
    let inv = match op.invariant_vector(cfg.tol, cfg.max_iter) {
        Ok(inv) => inv,
        Err(e @ Error::NotConverged { .. }) => {
            eprintln!(
                "power iteration on {} bins ({}) failed",
                bins,
                op.law_description()
            );
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let extra = [
        format!("operator = {}", op.law_description()),
        format!("n_bins = {bins}"),
    ];
    let comments = headed("ulam", cfg, &extra);

    let path = cfg.out.join("operator.csv");
    let mut w = create(&path)?;
    op.write_triplets(&mut w, &comments)?;
    w.flush()?;
    write_measure(
        &cfg.out.join("invariant.csv"),
        &inv.to_measure(&op)?,
        &comments,
    )?;
    write_json(
        &cfg.out.join("ulam.json"),
        &json!({
            "command": "ulam",
            "config": config_json(cfg),
            "operator": op.law_description(),
            "n_bins": bins,
            "nnz": op.nnz(),
            "residual": inv.residual,
            "iterations": inv.iterations,
        }),
    )?;
    println!(
        "residual = {:e} after {} iterations ({} bins)",
        inv.residual, inv.iterations, bins
    );
    Ok(())
}

pub fn suite_options(cfg: &ExperimentConfig) -> SuiteOptions {
    SuiteOptions {
        seed: cfg.seed,
        lambda_min: cfg.lambda_min,
        lambda_max: cfg.lambda_max,
        particles: cfg.particles,
        steps: cfg.steps,
        bins: cfg.figure_bins(),
        exp_rate: cfg.exp_rate,
    }
}

/// Reports without wall-clock fields, so reruns are byte-identical.
fn stable_json(r: &VerificationReport) -> Result<Value> {
    let mut v = serde_json::to_value(r)?;
    if let Some(m) = v.as_object_mut() {
        m.remove("runtime_ms");
    }
    Ok(v)
}

pub fn verify(cfg: &ExperimentConfig, selector: &str) -> Result<()> {
    let suite: Suite = selector.parse()?;
    let reports = run_suite(suite, &suite_options(cfg))?;
    let tag = selector.replace('-', "_");

    let stable = reports
        .iter()
        .map(stable_json)
        .collect::<Result<Vec<_>>>()?;
    write_json(
        &cfg.out.join(format!("verify_{tag}.json")),
        &json!({ "command": "verify", "suite": selector, "config": config_json(cfg), "reports": stable }),
    )?;
    let timings: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "claim": r.claim, "runtime_ms": r.runtime_ms }))
        .collect();
    write_json(
        &cfg.out.join(format!("verify_{tag}_timings.json")),
        &json!(timings),
    )?;

    // one line per claim family; probes such as reachability[...] are grouped
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut order = Vec::new();
    for r in &reports {
        let family = r.claim.split('[').next().unwrap_or(&r.claim);
        let g = groups.entry(family).or_insert_with(|| {
            order.push(family);
            (0, 0)
        });
        g.0 += 1;
        g.1 += r.pass as usize;
    }
    for family in order {
        let (n, ok) = groups[family];
        let verdict = if ok == n { "PASS" } else { "FAIL" };
        if n == 1 {
            let r = reports
                .iter()
                .find(|r| r.claim.starts_with(family))
                .expect("grouped above");
            println!(
                "{verdict} {} (worst case {}, threshold {})",
                r.claim, r.worst_case, r.threshold
            );
        } else {
            println!("{verdict} {family}: {ok}/{n} passed");
        }
    }

    let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.pass).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for r in &failed {
        eprintln!("{}", serde_json::to_string_pretty(&stable_json(r)?)?);
    }
    Err(ChecksFailed(failed.len()).into())
}
