//! Ulam discretization of the transfer operator.
//!
//! Bin `i` of a uniform grid is represented by `m` midpoint nodes; entry
//! `(i, j)` is the node-averaged kernel mass `p(x, bin j)`. The result is a
//! row-stochastic matrix whose left fixed point approximates the invariant
//! measure.
//!
//! Storage is compressed-row with a column-major copy, so that both
//! `πP` and row access accumulate in a fixed order. Results therefore do
//! not depend on how rows are split across threads.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{for_each_bin_mass, quadrature_nodes};
use crate::law::ParameterLaw;
use crate::measure::{stable_sum, uniform_edges, EmpiricalMeasure};

/// Row sums must be within this of one.
pub const ROW_SUM_TOL: f64 = 1e-10;

/// Smallest grid accepted by [`UlamOperator::build`].
pub const MIN_BINS: usize = 8;

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
struct Csr {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut ptr = Vec::with_capacity(rows.len() + 1);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut idx = Vec::with_capacity(nnz);
        let mut val = Vec::with_capacity(nnz);
        ptr.push(0);
        for row in rows {
            for (j, v) in row {
                idx.push(j);
                val.push(v);
            }
            ptr.push(idx.len());
        }
        Csr { ptr, idx, val }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.ptr[i]..self.ptr[i + 1];
        self.idx[r.clone()]
            .iter()
            .copied()
            .zip(self.val[r].iter().copied())
    }

    fn transpose(&self, n: usize) -> Csr {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..self.ptr.len() - 1 {
            for (j, v) in self.row(i) {
                cols[j].push((i, v));
            }
        }
        Csr::from_rows(cols)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UlamOperator {
    n_bins: usize,
    edges: Vec<f64>,
    law: String,
    rows: Csr,
    cols: Csr,
}

/// Left fixed point of an [`UlamOperator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub weights: Vec<f64>,
    /// `‖πP − π‖₁` at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
}

impl InvariantVector {
    pub fn to_measure(&self, op: &UlamOperator) -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::from_weights(op.edges.clone(), self.weights.clone())
    }
}

fn merge_row(mut entries: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    // stable sort keeps node order within each column, so sums are reproducible
    entries.sort_by_key(|&(j, _)| j);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
    for (j, p) in entries {
        match row.last_mut() {
            Some(last) if last.0 == j => last.1 += p,
            _ => row.push((j, p)),
        }
    }
    row
}

impl UlamOperator {
    /// Discretizes the kernel of `law` on `n_bins` uniform bins with
    /// `nodes_per_bin` midpoint nodes. Rows are renormalized to one.
    pub fn build(law: &ParameterLaw, n_bins: usize, nodes_per_bin: usize) -> Result<Self> {
        law.validate()?;
        if n_bins < MIN_BINS {
            return Err(Error::Config(format!(
                "ulam grid needs at least {MIN_BINS} bins"
            )));
        }
        if nodes_per_bin == 0 {
            return Err(Error::Config("quadrature needs at least one node".into()));
        }
        let edges = uniform_edges(n_bins);
        let w = 1.0 / nodes_per_bin as f64;
        let rows: Vec<Vec<(usize, f64)>> = (0..n_bins)
            .into_par_iter()
            .map(|i| {
                let mut entries = Vec::new();
                for x in quadrature_nodes(edges[i], edges[i + 1], nodes_per_bin) {
                    for_each_bin_mass(x, law, &edges, |j, p| entries.push((j, w * p)));
                }
                let mut row = merge_row(entries);
                let total = stable_sum(row.iter().map(|e| e.1));
                if !(total > 0.0) {
                    return Err(Error::EmptyRow(i));
                }
                for e in &mut row {
                    e.1 /= total;
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(Self::assemble(edges, law.to_string(), rows))
    }

    fn assemble(edges: Vec<f64>, law: String, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n_bins = rows.len();
        let rows = Csr::from_rows(rows);
        let cols = rows.transpose(n_bins);
        Self {
            n_bins,
            edges,
            law,
            rows,
            cols,
        }
    }

    /// Builds an operator from explicit sparse rows on a uniform grid.
    pub fn from_sparse_rows(rows: Vec<Vec<(usize, f64)>>, law: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Config("operator needs at least one bin".into()));
        }
        let mut merged = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row
                .iter()
                .any(|&(j, v)| j >= n || !(v >= 0.0) || !v.is_finite())
            {
                return Err(Error::Config(format!("row {i} has an invalid entry")));
            }
            let row: Vec<(usize, f64)> = merge_row(row)
                .into_iter()
                .filter(|&(_, v)| v > 0.0)
                .collect();
            let total = stable_sum(row.iter().map(|e| e.1));
            if total == 0.0 {
                return Err(Error::EmptyRow(i));
            }
            if (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Config(format!("row {i} sums to {total}")));
            }
            merged.push(row);
        }
        Ok(Self::assemble(uniform_edges(n), law.into(), merged))
    }

    pub fn from_dense(rows: &[Vec<f64>], law: impl Into<String>) -> Result<Self> {
        let sparse = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Self::from_sparse_rows(sparse, law)
    }

    /// The trivial kernel that never moves mass.
    pub fn identity(n_bins: usize) -> Self {
        let rows = (0..n_bins).map(|i| vec![(i, 1.0)]).collect();
        Self::assemble(uniform_edges(n_bins), "identity".into(), rows)
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn law_description(&self) -> &str {
        &self.law
    }

    pub fn nnz(&self) -> usize {
        self.rows.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows.row(i)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_bins)
            .map(|i| stable_sum(self.rows.row(i).map(|e| e.1)))
            .collect()
    }

    /// `vP` for a row vector `v`.
    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(
            v.len(),
            self.n_bins,
            "vector length does not match operator"
        );
        (0..self.n_bins)
            .into_par_iter()
            .map(|j| self.cols.row(j).map(|(i, p)| v[i] * p).sum())
            .collect()
    }

    /// One step of the discretized transfer operator.
    pub fn apply(&self, mu: &EmpiricalMeasure) -> Result<EmpiricalMeasure> {
        if mu.edges() != self.edges.as_slice() {
            return Err(Error::BinningMismatch);
        }
        EmpiricalMeasure::from_weights(self.edges.clone(), self.apply_vec(mu.masses()))
    }

    /// The iterates `μP, μP², …, μPⁿ`.
    pub fn evolve(&self, mu: &EmpiricalMeasure, n: usize) -> Result<Vec<EmpiricalMeasure>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = mu.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Dense `Pᵏ`, row by row.
    pub fn power_dense(&self, k: usize) -> Vec<Vec<f64>> {
        (0..self.n_bins)
            .map(|i| {
                let mut v = vec![0.0; self.n_bins];
                v[i] = 1.0;
                for _ in 0..k {
                    v = self.apply_vec(&v);
                }
                v
            })
            .collect()
    }

    /// Power iteration from the uniform vector until `‖πP − π‖₁ ≤ tol`.
    pub fn invariant_vector(&self, tol: f64, max_iter: usize) -> Result<InvariantVector> {
        if !(tol > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        let n = self.n_bins;
        let mut pi = vec![1.0 / n as f64; n];
        let mut residual = f64::INFINITY;
        for it in 0..=max_iter {
            let mut next = self.apply_vec(&pi);
            residual = l1_diff(&next, &pi);
            if residual <= tol {
                return Ok(InvariantVector {
                    weights: pi,
                    residual,
                    iterations: it,
                });
            }
            if it == max_iter {
                break;
            }
            let total = stable_sum(next.iter().copied());
            for x in &mut next {
                *x /= total;
            }
            pi = next;
        }
        // period-two behaviour shows up as πP² ≈ π while πP stays away
        let two = self.apply_vec(&self.apply_vec(&pi));
        let oscillating = l1_diff(&two, &pi) < 0.1 * residual;
        Err(Error::NotConverged {
            iterations: max_iter,
            residual,
            oscillating,
            last: pi,
        })
    }

    /// Smallest `k ≤ n_max` such that every row of `Pᵏ` puts positive mass
    /// on every bin in `target_bins`. Positivity is structural: it follows
    /// the sparsity pattern, not the floating-point values.
    pub fn power_positivity(&self, n_max: usize, target_bins: &[usize]) -> Option<usize> {
        assert!(!target_bins.is_empty(), "target must be nonempty");
        let pattern = self.pattern();
        let mut reach = pattern.clone();
        for k in 1..=n_max {
            if k > 1 {
                reach = reach
                    .iter()
                    .map(|r| pattern.step(r))
                    .collect::<Vec<_>>()
                    .into();
            }
            if reach
                .rows
                .iter()
                .all(|r| target_bins.iter().all(|&t| r.get(t)))
            {
                return Some(k);
            }
        }
        None
    }

    /// Smallest `k ≤ n_max` with `Pᵏ(start, j) > 0` for some target bin `j`.
    pub fn first_reach(&self, start: usize, target_bins: &[usize], n_max: usize) -> Option<usize> {
        let pattern = self.pattern();
        let mut cur = pattern.rows[start].clone();
        for k in 1..=n_max {
            if k > 1 {
                cur = pattern.step(&cur);
            }
            if target_bins.iter().any(|&t| cur.get(t)) {
                return Some(k);
            }
        }
        None
    }

    /// Estimate of the modulus of the second eigenvalue, from power
    /// iteration on zero-sum vectors (which `P` maps to zero-sum vectors).
    pub fn second_eigenvalue_estimate(&self, iterations: usize) -> f64 {
        let n = self.n_bins;
        let mut w: Vec<f64> = (0..n)
            .map(|i| ((i as f64 + 0.5) * 7.0 / n as f64).sin())
            .collect();
        let mut ratios = Vec::new();
        for _ in 0..iterations {
            let mean = w.iter().sum::<f64>() / n as f64;
            w.iter_mut().for_each(|x| *x -= mean);
            let before: f64 = w.iter().map(|x| x.abs()).sum();
            if before == 0.0 {
                return 0.0;
            }
            w.iter_mut().for_each(|x| *x /= before);
            w = self.apply_vec(&w);
            ratios.push(w.iter().map(|x| x.abs()).sum::<f64>());
        }
        let tail = &ratios[ratios.len().saturating_sub(20)..];
        if tail.is_empty() {
            return f64::NAN;
        }
        (tail.iter().map(|r| r.max(1e-300).ln()).sum::<f64>() / tail.len() as f64).exp()
    }

    fn pattern(&self) -> Pattern {
        let words = self.n_bins.div_ceil(64);
        let rows = (0..self.n_bins)
            .map(|i| {
                let mut b = Bits::new(words);
                for (j, v) in self.rows.row(i) {
                    if v > 0.0 {
                        b.set(j);
                    }
                }
                b
            })
            .collect();
        Pattern { rows }
    }

    /// Writes the `i,j,value` triplet list with a provenance header.
    pub fn write_triplets<W: Write>(&self, mut w: W, header_comments: &[String]) -> Result<()> {
        writeln!(w, "# n_bins={}", self.n_bins)?;
        writeln!(w, "# law={}", self.law)?;
        for line in header_comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "i,j,value")?;
        for i in 0..self.n_bins {
            for (j, v) in self.rows.row(i) {
                writeln!(w, "{i},{j},{v}")?;
            }
        }
        Ok(())
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let mut n_bins: Option<usize> = None;
        let mut law = String::new();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut seen_header = false;
        for (k, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let lineno = k + 1;
            let perr = |msg: String| Error::Parse { line: lineno, msg };
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("n_bins=") {
                    let n: usize = v.parse().map_err(|_| perr(format!("bad n_bins `{v}`")))?;
                    n_bins = Some(n);
                    rows = vec![Vec::new(); n];
                } else if let Some(v) = comment.strip_prefix("law=") {
                    law = v.to_string();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if !seen_header {
                if line != "i,j,value" {
                    return Err(perr("expected header `i,j,value`".into()));
                }
                seen_header = true;
                continue;
            }
            let n = n_bins.ok_or_else(|| perr("missing `# n_bins=` header".into()))?;
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(perr("expected three fields".into()));
            }
            let i: usize = f[0]
                .trim()
                .parse()
                .map_err(|_| perr("bad row index".into()))?;
            let j: usize = f[1]
                .trim()
                .parse()
                .map_err(|_| perr("bad column index".into()))?;
            let v: f64 = f[2].trim().parse().map_err(|_| perr("bad value".into()))?;
            if i >= n || j >= n {
                return Err(perr(format!("index out of range for {n} bins")));
            }
            rows[i].push((j, v));
        }
        if n_bins.is_none() {
            return Err(Error::Parse {
                line: 0,
                msg: "missing `# n_bins=` header".into(),
            });
        }
        Self::from_sparse_rows(rows, law)
    }
}

fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let t = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + t)
            })
        })
    }
}

/// Boolean sparsity pattern of an operator.
#[derive(Debug, Clone)]
struct Pattern {
    rows: Vec<Bits>,
}

impl From<Vec<Bits>> for Pattern {
    fn from(rows: Vec<Bits>) -> Self {
        Pattern { rows }
    }
}

impl Pattern {
    fn iter(&self) -> std::slice::Iter<'_, Bits> {
        self.rows.iter()
    }

    /// Support of `rP` for a row support `r`.
    fn step(&self, r: &Bits) -> Bits {
        let mut out = Bits::new(r.0.len());
        for j in r.ones() {
            for (o, w) in out.0.iter_mut().zip(&self.rows[j].0) {
                *o |= w;
            }
        }
        out
    }
}
