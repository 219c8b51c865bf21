//! Detrended fluctuation analysis.

use rayon::prelude::*;

use crate::error::{ensure_len, Error, Result};
use crate::numeric::{linear_fit, mean, pairwise_sum};

const AUTO_MIN_BOX: usize = 8;
const AUTO_BOX_COUNT: usize = 16;
/// Fluctuations at or below this fraction of the profile RMS are treated as zero.
const DEGENERATE_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum BoxSizes {
    /// Log-spaced integers from 8 to N/9.
    #[default]
    Auto,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfaParams {
    pub box_sizes: BoxSizes,
    /// Degree of the detrending polynomial.
    pub order: usize,
    /// Inclusive box-size bounds of the log-log fit; `None` uses all boxes.
    pub fit_range: Option<(usize, usize)>,
}

impl Default for DfaParams {
    fn default() -> Self {
        Self { box_sizes: BoxSizes::Auto, order: 1, fit_range: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfaResult {
    pub alpha: f64,
    pub box_sizes: Vec<usize>,
    pub fluctuations: Vec<f64>,
    pub fit_range: (usize, usize),
    pub fit_r2: f64,
}

pub fn auto_box_sizes(len: usize) -> Vec<usize> {
    let hi = len / 9;
    if hi < AUTO_MIN_BOX {
        return Vec::new();
    }
    let (lo_l, hi_l) = ((AUTO_MIN_BOX as f64).ln(), (hi as f64).ln());
    let mut sizes: Vec<usize> = (0..AUTO_BOX_COUNT)
        .map(|k| (lo_l + (hi_l - lo_l) * k as f64 / (AUTO_BOX_COUNT - 1) as f64).exp().round() as usize)
        .collect();
    sizes.dedup();
    sizes
}

/// Integrated, mean-removed series.
pub fn profile(x: &[f64]) -> Vec<f64> {
    let mu = mean(x);
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            acc += v - mu;
            acc
        })
        .collect()
}

/// Orthonormal polynomial basis of degree `order` on `n` equally spaced points,
/// stored column after column.
fn poly_basis(n: usize, order: usize) -> Vec<f64> {
    let c = (n as f64 - 1.0) / 2.0;
    let t: Vec<f64> = (0..n).map(|k| (k as f64 - c) / n as f64).collect();
    let mut q = vec![0.0; n * (order + 1)];
    for d in 0..=order {
        let (done, rest) = q.split_at_mut(d * n);
        let col = &mut rest[..n];
        for (v, &tk) in col.iter_mut().zip(&t) {
            *v = tk.powi(d as i32);
        }
        for _ in 0..2 {
            for prev in done.chunks_exact(n) {
                let p: f64 = prev.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                for (v, a) in col.iter_mut().zip(prev) {
                    *v -= p * a;
                }
            }
        }
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    q
}

fn residual_ss(segment: &[f64], basis: &[f64], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(segment);
    for q in basis.chunks_exact(segment.len()) {
        let p: f64 = q.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
        for (v, a) in scratch.iter_mut().zip(q) {
            *v -= p * a;
        }
    }
    scratch.iter().map(|v| v * v).sum()
}

/// RMS fluctuation of the profile around per-box polynomial trends, over
/// non-overlapping boxes taken from both ends of the profile.
pub fn fluctuation(profile: &[f64], box_size: usize, order: usize) -> f64 {
    let n = profile.len();
    let boxes = n / box_size;
    let basis = poly_basis(box_size, order);
    let mut scratch = Vec::with_capacity(box_size);
    let rss: Vec<f64> = (0..boxes)
        .map(|b| b * box_size)
        .chain((0..boxes).map(|b| n - (b + 1) * box_size))
        .map(|start| residual_ss(&profile[start..start + box_size], &basis, &mut scratch))
        .collect();
    (pairwise_sum(&rss) / (2 * boxes * box_size) as f64).sqrt()
}

pub fn dfa(x: &[f64], params: &DfaParams) -> Result<DfaResult> {
    if params.order > 8 {
        return Err(Error::InvalidParameter(format!("detrending order {} above 8", params.order)));
    }
    let mut sizes = match &params.box_sizes {
        BoxSizes::Auto => {
            ensure_len(x.len(), 9 * (AUTO_MIN_BOX + 2))?;
            auto_box_sizes(x.len())
        }
        BoxSizes::Explicit(s) => s.clone(),
    };
    sizes.sort_unstable();
    sizes.dedup();
    let (Some(&smallest), Some(&largest)) = (sizes.first(), sizes.last()) else {
        return Err(Error::InvalidParameter("no box sizes".into()));
    };
    if smallest < params.order + 2 {
        return Err(Error::InvalidParameter(format!(
            "box size {smallest} too small for order {}",
            params.order
        )));
    }
    ensure_len(x.len(), 4 * largest)?;

    let prof = profile(x);
    let fluctuations: Vec<f64> =
        sizes.par_iter().map(|&n| fluctuation(&prof, n, params.order)).collect();

    let (lo, hi) = params.fit_range.unwrap_or((smallest, largest));
    let in_range: Vec<usize> = (0..sizes.len()).filter(|&i| (lo..=hi).contains(&sizes[i])).collect();
    if in_range.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} box sizes in fit range {lo}..={hi}, need 3",
            in_range.len()
        )));
    }
    let rms = (prof.iter().map(|v| v * v).sum::<f64>() / prof.len() as f64).sqrt();
    if in_range.iter().any(|&i| !(fluctuations[i] > DEGENERATE_RATIO * rms)) {
        return Err(Error::DegenerateFit("zero fluctuation".into()));
    }
    let lx: Vec<f64> = in_range.iter().map(|&i| (sizes[i] as f64).log10()).collect();
    let ly: Vec<f64> = in_range.iter().map(|&i| fluctuations[i].log10()).collect();
    let (alpha, _, fit_r2) = linear_fit(&lx, &ly);
    Ok(DfaResult {
        alpha,
        box_sizes: sizes,
        fluctuations,
        fit_range: (lo, hi),
        fit_r2,
    })
}
