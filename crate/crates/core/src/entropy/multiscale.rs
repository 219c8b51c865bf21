use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::sample::{count_matches, MatchCounts};
use super::{absolute_tolerance, check_m_r, TOLERANCE_FLOOR};
use crate::error::{ensure_len, Error, Result};
use crate::numeric::{pairwise_sum, population_variance, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MultiscaleVariant {
    /// Refined composite: match counts pooled over all coarse-graining offsets.
    Rcmse,
    /// Composite: mean of per-offset sample entropies.
    Cmse,
    /// Classic: sample entropy of the offset-0 mean coarse-graining.
    Mse,
    /// Fuzzy entropy of the mean coarse-graining.
    Msfe,
    /// Sample entropy of the variance coarse-graining (scales ≥ 2).
    Gmse,
}

impl MultiscaleVariant {
    pub const ALL: [MultiscaleVariant; 5] = [Self::Rcmse, Self::Cmse, Self::Mse, Self::Msfe, Self::Gmse];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rcmse => "rcmse",
            Self::Cmse => "cmse",
            Self::Mse => "mse",
            Self::Msfe => "msfe",
            Self::Gmse => "gmse",
        }
    }
}

impl fmt::Display for MultiscaleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MultiscaleVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown multiscale variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiscaleCurve {
    pub variant: MultiscaleVariant,
    pub scales: Vec<usize>,
    /// `None` where the estimator is undefined at that scale.
    pub values: Vec<Option<f64>>,
}

/// Non-overlapping window means, starting at sample 0.
pub fn coarse_grain(x: &[f64], scale: usize) -> Vec<f64> {
    coarse_grain_offset(x, scale, 0)
}

/// Non-overlapping window means, starting at `offset`.
pub fn coarse_grain_offset(x: &[f64], scale: usize, offset: usize) -> Vec<f64> {
    x.get(offset..)
        .unwrap_or(&[])
        .chunks_exact(scale)
        .map(|w| w.iter().sum::<f64>() / scale as f64)
        .collect()
}

/// Non-overlapping window (population) variances, starting at `offset`.
pub fn variance_coarse_grain(x: &[f64], scale: usize, offset: usize) -> Vec<f64> {
    x.get(offset..)
        .unwrap_or(&[])
        .chunks_exact(scale)
        .map(population_variance)
        .collect()
}

fn counts_or_empty(y: &[f64], m: usize, tol: f64) -> MatchCounts {
    if y.len() < m + 2 {
        MatchCounts::default()
    } else {
        count_matches(y, m, tol)
    }
}

/// Fuzzy entropy with membership exp(−(d/r)²) on mean-removed templates;
/// `r` is a fraction of the standard deviation.
pub fn fuzzy_entropy(x: &[f64], m: usize, r: f64) -> Result<Option<f64>> {
    check_m_r(m, r)?;
    ensure_len(x.len(), m + 2)?;
    Ok(fuzzy_abs(x, m, absolute_tolerance(x, r)))
}

fn fuzzy_phi(x: &[f64], n: usize, len: usize, tol: f64) -> f64 {
    let templates: Vec<f64> = (0..n)
        .flat_map(|i| {
            let w = &x[i..i + len];
            let mu = w.iter().sum::<f64>() / len as f64;
            w.iter().map(move |v| v - mu)
        })
        .collect();
    let row_sums: Vec<f64> = (0..n)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let ti = &templates[i * len..(i + 1) * len];
            let mut acc = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                let tj = &templates[j * len..(j + 1) * len];
                let d = ti.iter().zip(tj).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let q = d / tol;
                acc += (-(q * q)).exp();
            }
            acc
        })
        .collect();
    pairwise_sum(&row_sums) / (n as f64 * (n as f64 - 1.0))
}

fn fuzzy_abs(x: &[f64], m: usize, tol: f64) -> Option<f64> {
    if x.len() < m + 2 {
        return None;
    }
    let n = x.len() - m;
    let pm = fuzzy_phi(x, n, m, tol);
    let pm1 = fuzzy_phi(x, n, m + 1, tol);
    (pm > 0.0 && pm1 > 0.0).then(|| pm.ln() - pm1.ln())
}

/// Multiscale entropy family for scales `1..=max_scale`.
///
/// The tolerance is fixed from the original series for every scale:
/// `r·std(x)` for the mean-based variants and `r·std(x)²` for GMSE, whose
/// coarse-grained values are variances.
pub fn multiscale_entropy_plus(
    x: &[f64],
    m: usize,
    r: f64,
    max_scale: usize,
    variants: &[MultiscaleVariant],
) -> Result<Vec<MultiscaleCurve>> {
    check_m_r(m, r)?;
    if max_scale == 0 || max_scale > x.len() / 10 {
        return Err(Error::InvalidParameter(format!(
            "max_scale={max_scale} must be in 1..={}",
            x.len() / 10
        )));
    }
    ensure_len(x.len(), max_scale * (m + 2))?;
    let tol = absolute_tolerance(x, r);
    let sd = std_dev(x);
    let var_tol = (r * sd * sd).max(TOLERANCE_FLOOR);
    let wants = |v| variants.contains(&v);
    let composite = wants(MultiscaleVariant::Cmse) || wants(MultiscaleVariant::Rcmse);

    let per_scale: Vec<Vec<Option<f64>>> = (1..=max_scale)
        .map(|s| {
            let offset_counts: Vec<MatchCounts> = if composite {
                (0..s).map(|k| counts_or_empty(&coarse_grain_offset(x, s, k), m, tol)).collect()
            } else if wants(MultiscaleVariant::Mse) {
                vec![counts_or_empty(&coarse_grain(x, s), m, tol)]
            } else {
                Vec::new()
            };
            variants
                .iter()
                .map(|v| match v {
                    MultiscaleVariant::Mse => offset_counts[0].sample_entropy(),
                    MultiscaleVariant::Cmse => {
                        let vals: Option<Vec<f64>> = offset_counts.iter().map(MatchCounts::sample_entropy).collect();
                        vals.map(|v| pairwise_sum(&v) / v.len() as f64)
                    }
                    MultiscaleVariant::Rcmse => offset_counts
                        .iter()
                        .fold(MatchCounts::default(), |a, &b| a + b)
                        .sample_entropy(),
                    MultiscaleVariant::Msfe => fuzzy_abs(&coarse_grain(x, s), m, tol),
                    MultiscaleVariant::Gmse if s == 1 => None,
                    MultiscaleVariant::Gmse => counts_or_empty(&variance_coarse_grain(x, s, 0), m, var_tol).sample_entropy(),
                })
                .collect()
        })
        .collect();

    Ok(variants
        .iter()
        .enumerate()
        .map(|(vi, &variant)| MultiscaleCurve {
            variant,
            scales: (1..=max_scale).collect(),
            values: per_scale.iter().map(|row| row[vi]).collect(),
        })
        .collect())
}
