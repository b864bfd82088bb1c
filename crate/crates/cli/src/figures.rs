//! Data bundles for redrawing the published figures. Each figure gets its
//! own directory holding one histogram CSV per series, an analytic curve
//! where one exists, and `figure.json` listing the series.

use std::io::Write;
use std::path::Path;

use anyhow::Result;
use randlogistic::logistic::beta_invariant_density;
use randlogistic::{
    EmpiricalMeasure, Ensemble, Error, InitialLaw, ParameterLaw, SeedPolicy, StateValue,
};
use serde_json::{json, Value};

use crate::commands::{create, write_json, write_measure};
use crate::config::ExperimentConfig;

pub const FIGURE_IDS: &[&str] = &[
    "betadist",
    "determinist_density",
    "dists",
    "enddist",
    "nar",
    "evol",
];

const CURVE_POINTS: usize = 1000;
const EVOL_STEPS: [usize; 4] = [1, 5, 20, 200];

struct Series {
    name: String,
    lambda: ParameterLaw,
    init: &'static str,
    step: usize,
    hist: EmpiricalMeasure,
}

fn snapshots(
    cfg: &ExperimentConfig,
    seed: SeedPolicy,
    lambda: &ParameterLaw,
    init: &'static str,
    steps: &[usize],
) -> Result<Vec<(usize, EmpiricalMeasure)>> {
    let law = InitialLaw::by_name(init, cfg.exp_rate).expect("catalog name");
    let e = Ensemble::sample_initial(&law, cfg.particles, seed)?;
    let last = steps.iter().copied().max().unwrap_or(0);
    Ok(e.run(lambda, last, steps, cfg.figure_bins())?.snapshots)
}

fn single(
    cfg: &ExperimentConfig,
    seed: SeedPolicy,
    name: &str,
    lambda: ParameterLaw,
    init: &'static str,
    step: usize,
) -> Result<Series> {
    let hist = snapshots(cfg, seed, &lambda, init, &[step])?.remove(0).1;
    Ok(Series {
        name: name.to_string(),
        lambda,
        init,
        step,
        hist,
    })
}

fn series_for(id: &str, cfg: &ExperimentConfig, seed: SeedPolicy) -> Result<Vec<Series>> {
    let chaotic = cfg.parameter_law()?;
    let point = ParameterLaw::point;
    let uniform = ParameterLaw::uniform;
    let n = cfg.steps;
    Ok(match id {
        "betadist" => vec![single(
            cfg,
            seed.derive(0),
            "lambda_4",
            point(4.0)?,
            "uniform",
            n,
        )?],
        "determinist_density" => vec![
            single(
                cfg,
                seed.derive(0),
                "lambda_3.87",
                point(3.87)?,
                "uniform",
                n,
            )?,
            single(
                cfg,
                seed.derive(1),
                "lambda_3.935",
                point(3.935)?,
                "uniform",
                n,
            )?,
        ],
        "dists" => ["discrete5", "uniform", "exponential"]
            .iter()
            .enumerate()
            .map(|(k, &init)| single(cfg, seed.derive(k as u64), init, chaotic.clone(), init, 0))
            .collect::<Result<_>>()?,
        "enddist" => vec![single(
            cfg,
            seed.derive(0),
            "exponential",
            chaotic,
            "exponential",
            n,
        )?],
        "nar" => vec![
            single(
                cfg,
                seed.derive(0),
                "uniform_3.87_3.9",
                uniform(3.87, 3.9)?,
                "uniform",
                n,
            )?,
            single(
                cfg,
                seed.derive(1),
                "uniform_3.87_3.935",
                uniform(3.87, 3.935)?,
                "uniform",
                n,
            )?,
        ],
        "evol" => snapshots(cfg, seed.derive(0), &chaotic, "uniform", &EVOL_STEPS)?
            .into_iter()
            .map(|(step, hist)| Series {
                name: format!("step_{step}"),
                lambda: chaotic.clone(),
                init: "uniform",
                step,
                hist,
            })
            .collect(),
        other => return Err(unknown(other).into()),
    })
}

fn unknown(id: &str) -> Error {
    Error::Config(format!(
        "unknown figure `{id}`; valid ids: {}, all",
        FIGURE_IDS.join(", ")
    ))
}

fn write_arcsine_curve(path: &Path, comments: &[String]) -> Result<()> {
    let mut w = create(path)?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "x,density")?;
    for k in 0..CURVE_POINTS {
        let x = (k as f64 + 0.5) / CURVE_POINTS as f64;
        writeln!(w, "{x},{}", beta_invariant_density(StateValue::new(x)?)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn figure(cfg: &ExperimentConfig, id: &str) -> Result<()> {
    if id == "all" {
        for id in FIGURE_IDS {
            figure(cfg, id)?;
        }
        return Ok(());
    }
    let Some(index) = FIGURE_IDS.iter().position(|&f| f == id) else {
        return Err(unknown(id).into());
    };
    let seed = cfg.seed_policy().derive(0xf16 + index as u64);
    let series = series_for(id, cfg, seed)?;
    let dir = cfg.out.join(id);

    let mut listed: Vec<Value> = Vec::new();
    for s in &series {
        let file = format!("{}.csv", s.name);
        let mut comments = vec![format!("randlogistic figure {id}")];
        comments.extend(cfg.provenance());
        comments.extend([
            format!("series = {}", s.name),
            format!("lambda_law = {}", s.lambda),
            format!("initial_law = {}", s.init),
            format!("step = {}", s.step),
        ]);
        write_measure(&dir.join(&file), &s.hist, &comments)?;
        listed.push(json!({
            "name": s.name,
            "file": file,
            "lambda_law": s.lambda.to_string(),
            "initial_law": s.init,
            "step": s.step,
        }));
    }
    let mut manifest = json!({ "figure": id, "series": listed });
    if id == "betadist" {
        let comments = vec![
            "randlogistic figure betadist".to_string(),
            "density 1/(pi sqrt(x(1-x))) at bin midpoints of a 1000-point grid".to_string(),
        ];
        write_arcsine_curve(&dir.join("analytic_density.csv"), &comments)?;
        manifest["curve"] = json!({ "file": "analytic_density.csv", "points": CURVE_POINTS });
    }
    write_json(&dir.join("figure.json"), &manifest)?;
    println!("figure {id}: {} series in {}", series.len(), dir.display());
    Ok(())
}
