use rayon::prelude::*;

use super::{Norm, RqaParams};
use crate::error::{Error, Result};
use crate::statespace::StateMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrencePlot {
    n: usize,
    radius: f64,
    norm: Norm,
    theiler: usize,
    /// Word offset of each triangle row; `n + 1` entries.
    offsets: Vec<usize>,
    words: Vec<u64>,
    strengths: Option<Vec<f64>>,
}

pub(crate) fn row_words(n: usize, i: usize) -> usize {
    (n - i).div_ceil(64)
}

fn row_offsets(n: usize) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0;
    offsets.push(0);
    for i in 0..n {
        acc += row_words(n, i);
        offsets.push(acc);
    }
    offsets
}

/// Bytes needed to build and quantify a plot over `n` points of dimension `dim`.
pub fn estimate_plot_bytes(n: usize, dim: usize, weighted_entropy: bool) -> u64 {
    let n = n as u64;
    // Σ ceil((n − i)/64) words, bounded by the exact triangle plus one word per row
    let words = (n * (n + 1) / 2).div_ceil(64) + n;
    let per_point = 8 * (1 + dim as u64) + if weighted_entropy { 8 } else { 0 };
    // line-scan buffers: two run arrays, two activity bitsets, two histograms
    let scan = 8 * (4 * n + 2) + 2 * 8 * n.div_ceil(64);
    words * 8 + per_point * n + scan
}

impl RecurrencePlot {
    /// Threshold the pairwise distances of `points` at `params.radius`.
    ///
    /// Fails with `MemoryBudgetExceeded` before allocating when the estimate
    /// from [`estimate_plot_bytes`] exceeds `budget`.
    pub fn build(points: &StateMatrix, params: &RqaParams, budget: Option<u64>) -> Result<Self> {
        params.validate()?;
        let n = points.rows();
        if n < 2 {
            return Err(Error::EmptyStateMatrix);
        }
        if let Some(budget) = budget {
            let estimated = estimate_plot_bytes(n, points.dim(), params.weighted_entropy);
            if estimated > budget {
                return Err(Error::MemoryBudgetExceeded { estimated, budget });
            }
        }
        let (radius, norm, w) = (params.radius, params.norm, params.theiler);
        let offsets = row_offsets(n);
        let mut words = vec![0u64; offsets[n]];
        let mut rows: Vec<&mut [u64]> = Vec::with_capacity(n);
        let mut rest = words.as_mut_slice();
        for i in 0..n {
            let (head, tail) = rest.split_at_mut(row_words(n, i));
            rows.push(head);
            rest = tail;
        }
        let strengths: Vec<f64> = rows
            .into_par_iter()
            .enumerate()
            .with_min_len(16)
            .map(|(i, row)| {
                let pi = points.row(i);
                if w == 0 {
                    row[0] |= 1;
                }
                let mut s = 0.0;
                if params.weighted_entropy {
                    for j in 0..i.saturating_sub(w) {
                        s += (-norm.distance(pi, points.row(j))).exp();
                    }
                }
                for j in i + w + 1..n {
                    let d = norm.distance(pi, points.row(j));
                    if params.weighted_entropy {
                        s += (-d).exp();
                    }
                    if d <= radius {
                        let k = j - i;
                        row[k / 64] |= 1 << (k % 64);
                    }
                }
                s
            })
            .collect();
        Ok(Self {
            n,
            radius,
            norm,
            theiler: w,
            offsets,
            words,
            strengths: params.weighted_entropy.then_some(strengths),
        })
    }

    pub(crate) fn from_parts(n: usize, radius: f64, norm: Norm, theiler: usize, words: Vec<u64>) -> Result<Self> {
        let offsets = row_offsets(n);
        if words.len() != offsets[n] {
            return Err(Error::InvalidParameter(format!(
                "{} words do not form a triangle over {n} points",
                words.len()
            )));
        }
        Ok(Self { n, radius, norm, theiler, offsets, words, strengths: None })
    }

    /// Number of points (side length of the square plot).
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn theiler(&self) -> usize {
        self.theiler
    }

    /// Per-point sums of exp(−d) over partners outside the Theiler window.
    pub fn strengths(&self) -> Option<&[f64]> {
        self.strengths.as_deref()
    }

    /// Bit k of triangle row i is cell (i, i + k).
    pub(crate) fn triangle_row(&self, i: usize) -> &[u64] {
        &self.words[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = j - i;
        self.triangle_row(i)[k / 64] >> (k % 64) & 1 == 1
    }

    /// Set cells in the full n × n matrix.
    pub fn count_ones(&self) -> u64 {
        let all: u64 = self.words.iter().map(|w| u64::from(w.count_ones())).sum();
        let diagonal: u64 = (0..self.n).map(|i| self.triangle_row(i)[0] & 1).sum();
        2 * all - diagonal
    }

    /// Bytes held by the bit storage.
    pub fn storage_bytes(&self) -> u64 {
        (self.words.len() * 8 + self.offsets.len() * 8) as u64
    }
}
