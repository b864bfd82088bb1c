//! Binned probability measures on `[0, 1]` and distances between them.
//!
//! On a fixed partition, total variation `sup_B |μ(B) − ν(B)|` over unions
//! of bins equals `½ Σ |μᵢ − νᵢ|`. For measures that are constant on bins
//! this is the exact total variation distance; otherwise it is a
//! resolution-limited proxy and the bin count is the resolution knob.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Default bin count for histograms that mirror published figures.
pub const DEFAULT_FIGURE_BINS: usize = 100;

/// Tolerance on `Σ masses` accepted by [`EmpiricalMeasure::new`] before
/// renormalizing.
pub const MASS_INPUT_TOL: f64 = 1e-9;

/// CSV column header shared by every measure file.
pub const CSV_HEADER: &str = "bin_lo,bin_hi,mass";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    edges: Vec<f64>,
    masses: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub tv: f64,
    /// `∫ |f − g| dx` between the bin-wise constant densities, i.e. `Σ |μᵢ − νᵢ|`.
    pub l1_density: f64,
    pub ks: f64,
}

/// `n + 1` equally spaced edges `k / n`.
pub fn uniform_edges(n_bins: usize) -> Vec<f64> {
    (0..=n_bins).map(|k| k as f64 / n_bins as f64).collect()
}

fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidMeasure("need at least one bin".into()));
    }
    if edges[0] != 0.0 || edges[edges.len() - 1] != 1.0 {
        return Err(Error::InvalidMeasure(
            "edges must start at 0 and end at 1".into(),
        ));
    }
    if edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidMeasure(
            "edges must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Index of the bin containing `x`; the last bin is closed on the right.
#[inline]
pub fn bin_index(edges: &[f64], x: f64) -> usize {
    let n = edges.len() - 1;
    edges
        .partition_point(|&e| e <= x)
        .saturating_sub(1)
        .min(n - 1)
}

/// Neumaier-compensated sum.
pub(crate) fn stable_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl EmpiricalMeasure {
    /// Validates the edges and masses; masses whose total is within
    /// [`MASS_INPUT_TOL`] of one are rescaled to sum to one.
    pub fn new(edges: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        check_edges(&edges)?;
        if masses.len() + 1 != edges.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} masses for {} bins",
                masses.len(),
                edges.len() - 1
            )));
        }
        if masses.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidMeasure(
                "masses must be finite and nonnegative".into(),
            ));
        }
        let total = stable_sum(masses.iter().copied());
        if (total - 1.0).abs() > MASS_INPUT_TOL {
            return Err(Error::InvalidMeasure(format!(
                "masses sum to {total}, not 1"
            )));
        }
        let mut m = Self { edges, masses };
        m.renormalize();
        Ok(m)
    }

    /// Normalizes arbitrary nonnegative weights (for example counts).
    pub fn from_weights(edges: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total = stable_sum(weights.iter().copied());
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("weights have no mass".into()));
        }
        let masses = weights.iter().map(|w| w / total).collect();
        Self::new(edges, masses)
    }

    pub(crate) fn from_parts_unchecked(edges: Vec<f64>, masses: Vec<f64>) -> Self {
        debug_assert_eq!(edges.len(), masses.len() + 1);
        Self { edges, masses }
    }

    pub fn uniform(n_bins: usize) -> Self {
        let m = 1.0 / n_bins as f64;
        Self {
            edges: uniform_edges(n_bins),
            masses: vec![m; n_bins],
        }
    }

    /// All mass in the bin containing `x`.
    pub fn point_mass(edges: Vec<f64>, x: f64) -> Result<Self> {
        check_edges(&edges)?;
        let mut masses = vec![0.0; edges.len() - 1];
        masses[bin_index(&edges, x)] = 1.0;
        Ok(Self { edges, masses })
    }

    /// Bins an analytic law given by its distribution function.
    pub fn from_cdf(edges: Vec<f64>, cdf: impl Fn(f64) -> f64) -> Result<Self> {
        check_edges(&edges)?;
        let masses = edges
            .windows(2)
            .map(|w| (cdf(w[1]) - cdf(w[0])).max(0.0))
            .collect();
        Self::from_weights(edges, masses)
    }

    pub fn from_samples(samples: &[f64], edges: Vec<f64>) -> Result<Self> {
        check_edges(&edges)?;
        if samples.is_empty() {
            return Err(Error::InvalidMeasure("no samples".into()));
        }
        let mut counts = vec![0u64; edges.len() - 1];
        for &x in samples {
            counts[bin_index(&edges, x)] += 1;
        }
        let n = samples.len() as f64;
        let masses = counts.iter().map(|&c| c as f64 / n).collect();
        Ok(Self { edges, masses })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn n_bins(&self) -> usize {
        self.masses.len()
    }

    pub fn bin(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }

    pub fn total_mass(&self) -> f64 {
        stable_sum(self.masses.iter().copied())
    }

    /// Piecewise-constant density value on bin `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / (self.edges[i + 1] - self.edges[i])
    }

    /// Mass of `[0, edges[k])`, for `k = 0..=n_bins`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.edges.len());
        out.push(0.0);
        for m in &self.masses {
            acc += m;
            out.push(acc);
        }
        out
    }

    pub fn mean(&self) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.masses)
            .map(|(w, m)| 0.5 * (w[0] + w[1]) * m)
            .sum()
    }

    pub fn same_binning(&self, other: &EmpiricalMeasure) -> bool {
        self.edges == other.edges
    }

    fn renormalize(&mut self) {
        let total = stable_sum(self.masses.iter().copied());
        if total > 0.0 && total != 1.0 {
            for m in &mut self.masses {
                *m /= total;
            }
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header_comments: &[String]) -> Result<()> {
        for line in header_comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{CSV_HEADER}")?;
        for (i, m) in self.masses.iter().enumerate() {
            writeln!(w, "{},{},{}", self.edges[i], self.edges[i + 1], m)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, header_comments: &[String]) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, header_comments)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Reads the `bin_lo,bin_hi,mass` format; `#` lines are skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut edges: Vec<f64> = Vec::new();
        let mut masses = Vec::new();
        let mut seen_header = false;
        for (k, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = k + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                if line != CSV_HEADER {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header `{CSV_HEADER}`"),
                    });
                }
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "expected three fields".into(),
                });
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })
            };
            let (lo, hi, m) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            match edges.last() {
                None => edges.push(lo),
                Some(&prev) if prev != lo => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("bin starts at {lo} but previous bin ended at {prev}"),
                    })
                }
                _ => {}
            }
            edges.push(hi);
            masses.push(m);
        }
        Self::new(edges, masses)
    }
}

/// Uniform-width histogram of the ensemble's particles.
pub fn histogram(e: &Ensemble, n_bins: usize) -> Result<EmpiricalMeasure> {
    if n_bins < 2 {
        return Err(Error::InvalidMeasure(
            "histogram needs at least two bins".into(),
        ));
    }
    EmpiricalMeasure::from_samples(e.particles(), uniform_edges(n_bins))
}

fn check_same(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<()> {
    if mu.same_binning(nu) {
        Ok(())
    } else {
        Err(Error::BinningMismatch)
    }
}

/// `½ Σ |μᵢ − νᵢ|` on a common binning.
pub fn tv_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    check_same(mu, nu)?;
    let l1: f64 = mu
        .masses
        .iter()
        .zip(&nu.masses)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * l1).min(1.0))
}

/// Total variation, L1 density distance and KS distance on a common binning.
pub fn distance_report(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<DistanceReport> {
    check_same(mu, nu)?;
    let l1: f64 = mu
        .masses
        .iter()
        .zip(&nu.masses)
        .map(|(a, b)| (a - b).abs())
        .sum();
    let ks = mu
        .cumulative()
        .iter()
        .zip(nu.cumulative())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(DistanceReport {
        tv: (0.5 * l1).min(1.0),
        l1_density: l1,
        ks: ks.min(1.0),
    })
}

/// Redistributes mass onto `target_edges`, spreading each source bin's
/// mass uniformly over its width.
pub fn rebin(mu: &EmpiricalMeasure, target_edges: &[f64]) -> Result<EmpiricalMeasure> {
    check_edges(target_edges)?;
    if mu.edges == target_edges {
        return Ok(mu.clone());
    }
    let mut out = vec![0.0; target_edges.len() - 1];
    let mut j = 0;
    for (i, &m) in mu.masses.iter().enumerate() {
        let (lo, hi) = mu.bin(i);
        if m == 0.0 {
            continue;
        }
        while target_edges[j + 1] <= lo {
            j += 1;
        }
        let width = hi - lo;
        let mut remaining = m;
        let mut k = j;
        loop {
            let t_hi = target_edges[k + 1];
            if t_hi >= hi || k + 1 == out.len() {
                // last piece takes the remainder so the source mass is fully placed
                out[k] += remaining;
                break;
            }
            let piece = m * ((t_hi - lo.max(target_edges[k])) / width);
            let piece = piece.min(remaining);
            out[k] += piece;
            remaining -= piece;
            k += 1;
        }
    }
    Ok(EmpiricalMeasure::from_parts_unchecked(
        target_edges.to_vec(),
        out,
    ))
}

/// Running average `(1/n) Σ μₘ` of a history of measures on common bins.
pub fn cesaro_average(history: &[EmpiricalMeasure]) -> Result<EmpiricalMeasure> {
    let first = history
        .first()
        .ok_or_else(|| Error::InvalidMeasure("empty history".into()))?;
    let mut acc = vec![0.0; first.n_bins()];
    for mu in history {
        check_same(first, mu)?;
        for (a, m) in acc.iter_mut().zip(&mu.masses) {
            *a += m;
        }
    }
    let n = history.len() as f64;
    let mut out = EmpiricalMeasure::from_parts_unchecked(
        first.edges.clone(),
        acc.into_iter().map(|a| a / n).collect(),
    );
    out.renormalize();
    Ok(out)
}

/// `max_k |F_μ(edge_k) − F(edge_k)|` against an analytic distribution function.
pub fn ks_statistic(mu: &EmpiricalMeasure, analytic_cdf: impl Fn(f64) -> f64) -> f64 {
    mu.cumulative()
        .iter()
        .zip(&mu.edges)
        .map(|(f, &e)| (f - analytic_cdf(e)).abs())
        .fold(0.0, f64::max)
        .min(1.0)
}
