use rayon::prelude::*;

use super::{absolute_tolerance, check_m_r};
use crate::error::{ensure_len, Result};

/// Template match counts behind sample entropy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchCounts {
    /// Pairs matching at length m + 1.
    pub a: u64,
    /// Pairs matching at length m.
    pub b: u64,
}

impl MatchCounts {
    pub fn sample_entropy(&self) -> Option<f64> {
        (self.a > 0 && self.b > 0).then(|| -(self.a as f64 / self.b as f64).ln())
    }
}

impl std::ops::Add for MatchCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }
}

/// Sample entropy −ln(A/B) (Richman–Moorman). `None` when either count is zero.
pub fn sample_entropy(x: &[f64], m: usize, r: f64) -> Result<Option<f64>> {
    check_m_r(m, r)?;
    Ok(sample_entropy_counts(x, m, absolute_tolerance(x, r))?.sample_entropy())
}

/// Counts of distinct template pairs (self-matches excluded) over the first
/// N − m templates, using an absolute tolerance.
pub fn sample_entropy_counts(x: &[f64], m: usize, tol: f64) -> Result<MatchCounts> {
    check_m_r(m, tol)?;
    ensure_len(x.len(), m + 2)?;
    Ok(count_matches(x, m, tol))
}

// Templates are visited in order of their first sample so that the inner scan
// can stop as soon as that sample alone is out of tolerance.
pub(crate) fn count_matches(x: &[f64], m: usize, tol: f64) -> MatchCounts {
    let n = x.len() - m;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]).then(a.cmp(&b)));
    (0..n)
        .into_par_iter()
        .with_min_len(256)
        .map(|p| {
            let i = order[p] as usize;
            let xi = x[i];
            let mut c = MatchCounts::default();
            for &j in &order[p + 1..] {
                let j = j as usize;
                if x[j] - xi > tol {
                    break;
                }
                if (1..m).all(|k| (x[i + k] - x[j + k]).abs() <= tol) {
                    c.b += 1;
                    if (x[i + m] - x[j + m]).abs() <= tol {
                        c.a += 1;
                    }
                }
            }
            c
        })
        .reduce(MatchCounts::default, |a, b| a + b)
}
