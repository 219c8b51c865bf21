//! Largest Lyapunov exponent from a scalar series.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{ensure_len, Error, Result};
use crate::neighbors::{DelayView, SortedIndex};
use crate::numeric::{linear_fit, mean, min_max, pairwise_sum};
use crate::statespace::EmbeddingParams;

const MIN_REFERENCE_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum MeanPeriod {
    /// Reciprocal of the mean frequency of the magnitude spectrum.
    #[default]
    Auto,
    Samples(f64),
}

/// Mean period in samples: 1 / Σ f|X(f)| / Σ |X(f)| over positive frequencies
/// of the mean-removed, Hann-windowed series.
pub fn mean_period(x: &[f64]) -> Result<f64> {
    ensure_len(x.len(), 4)?;
    let mu = mean(x);
    let len = x.len() as f64;
    // without a taper, leakage from a non-integer number of cycles drags the
    // mean frequency far upwards
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / len).cos();
            Complex::new((v - mu) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let n = len;
    let half = x.len() / 2;
    let mags: Vec<f64> = buf[1..=half].iter().map(|c| c.norm()).collect();
    let weighted: Vec<f64> = mags.iter().enumerate().map(|(k, m)| (k + 1) as f64 / n * m).collect();
    let total = pairwise_sum(&mags);
    if !(total > 0.0) {
        return Err(Error::DegenerateSeries);
    }
    Ok(total / pairwise_sum(&weighted))
}

fn resolve_period(x: &[f64], p: MeanPeriod) -> Result<f64> {
    match p {
        MeanPeriod::Auto => mean_period(x),
        MeanPeriod::Samples(v) if v > 0.0 && v.is_finite() => Ok(v),
        MeanPeriod::Samples(v) => Err(Error::InvalidParameter(format!("mean period {v} must be positive"))),
    }
}

fn check_rate(rate: Option<f64>) -> Result<f64> {
    match rate {
        None => Ok(1.0),
        Some(r) if r > 0.0 && r.is_finite() => Ok(r),
        Some(r) => Err(Error::InvalidParameter(format!("sample rate {r} must be positive"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosensteinParams {
    pub embedding: EmbeddingParams,
    pub mean_period: MeanPeriod,
    /// Steps to follow each neighbour pair; `None` takes ten mean periods,
    /// limited so that 100 reference points remain.
    pub max_steps: Option<usize>,
    /// Report exponents per second instead of per sample.
    pub sample_rate_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RosensteinResult {
    /// Mean log distance of neighbour pairs after k steps, k = 0..=max_steps.
    pub divergence: Vec<f64>,
    pub mean_period: f64,
    /// Slope over steps 0..P.
    pub short_exp: Option<f64>,
    /// Steepest slope over any window spanning a quarter of the curve.
    pub local_exp: Option<f64>,
    /// Slope over steps P..4P.
    pub long_exp: Option<f64>,
    /// Slope over steps 4P..10P, clipped to the curve.
    pub orbital_exp: Option<f64>,
    /// Inclusive step ranges behind short, local, long and orbital.
    pub fit_windows: [(usize, usize); 4],
}

fn slope(curve: &[f64], (a, b): (usize, usize)) -> Option<f64> {
    if b <= a || b >= curve.len() {
        return None;
    }
    let t: Vec<f64> = (a..=b).map(|k| k as f64).collect();
    Some(linear_fit(&t, &curve[a..=b]).0)
}

/// Rosenstein's method: each point's nearest neighbour farther than one
/// mean period away in time is followed forward, and the log separations
/// are averaged per step.
pub fn lye_rosenstein(x: &[f64], params: &RosensteinParams) -> Result<RosensteinResult> {
    let emb = params.embedding;
    let rate = check_rate(params.sample_rate_hz)?;
    ensure_len(x.len(), emb.window() + MIN_REFERENCE_POINTS)?;
    let m = emb.points(x.len());
    let period = resolve_period(x, params.mean_period)?;
    let max_steps = match params.max_steps {
        Some(0) => return Err(Error::InvalidParameter("max_steps must be ≥ 1".into())),
        Some(s) => s,
        None => ((10.0 * period).ceil() as usize).min(m - MIN_REFERENCE_POINTS).max(1),
    };
    ensure_len(m, max_steps + MIN_REFERENCE_POINTS)?;
    let refs = m - max_steps;

    let view = DelayView::new(x, emb.tau, emb.dim, m);
    let index = SortedIndex::new(DelayView::new(x, emb.tau, emb.dim, refs));
    let neighbours: Vec<Option<usize>> = (0..refs)
        .into_par_iter()
        .with_min_len(64)
        .map(|i| index.nearest(i, |j| (i.abs_diff(j) as f64) > period, true).map(|(j, _)| j))
        .collect();
    if neighbours.iter().all(Option::is_none) {
        return Err(Error::NoValidNeighbors);
    }

    let divergence: Vec<f64> = (0..=max_steps)
        .into_par_iter()
        .map(|k| {
            let logs: Vec<f64> = neighbours
                .iter()
                .enumerate()
                .filter_map(|(i, nb)| {
                    let d2 = view.sq_dist(i + k, (*nb)? + k);
                    (d2 > 0.0).then(|| 0.5 * d2.ln())
                })
                .collect();
            if logs.is_empty() {
                f64::NEG_INFINITY
            } else {
                pairwise_sum(&logs) / logs.len() as f64
            }
        })
        .collect();
    if divergence.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoValidNeighbors);
    }

    let at = |mult: f64| ((mult * period).round() as usize).min(max_steps);
    let quarter = (max_steps / 4).max(1);
    let local = (0..=max_steps - quarter)
        .filter_map(|a| slope(&divergence, (a, a + quarter)).map(|s| (a, s)))
        .fold(None, |best: Option<(usize, f64)>, (a, s)| match best {
            Some((_, bs)) if bs >= s => best,
            _ => Some((a, s)),
        });
    let local_start = local.map_or(0, |(a, _)| a);
    let fit_windows = [
        (0, at(1.0)),
        (local_start, local_start + quarter),
        (at(1.0), at(4.0)),
        (at(4.0), at(10.0)),
    ];
    let per_unit = |s: Option<f64>| s.map(|v| v * rate);
    Ok(RosensteinResult {
        short_exp: per_unit(slope(&divergence, fit_windows[0])),
        local_exp: per_unit(local.map(|(_, s)| s)),
        long_exp: per_unit(slope(&divergence, fit_windows[2])),
        orbital_exp: per_unit(slope(&divergence, fit_windows[3])),
        divergence,
        mean_period: period,
        fit_windows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfParams {
    pub embedding: EmbeddingParams,
    pub evolve_steps: usize,
    /// Smallest accepted separation, as a fraction of the series range.
    pub scale_min: f64,
    /// Separation that triggers a replacement, as a fraction of the series range.
    pub scale_max: f64,
    /// Temporal exclusion for neighbour candidates.
    pub mean_period: MeanPeriod,
    pub sample_rate_hz: Option<f64>,
}

impl WolfParams {
    pub fn new(embedding: EmbeddingParams) -> Self {
        Self {
            embedding,
            evolve_steps: 3,
            scale_min: 0.01,
            scale_max: 0.1,
            mean_period: MeanPeriod::Auto,
            sample_rate_hz: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfResult {
    pub largest_exponent: f64,
    pub replacements: usize,
    /// Total evolved steps.
    pub evolution_steps: usize,
}

/// Orientation limits (radians) tried in turn when looking for a replacement.
const ANGLE_PASSES: [f64; 3] = [0.3, 0.6, std::f64::consts::PI];

fn angle(view: &DelayView, origin: usize, a: usize, b: usize) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for k in 0..view.dim {
        let o = view.coord(origin, k);
        let (u, v) = (view.coord(a, k) - o, view.coord(b, k) - o);
        dot += u * v;
        na += u * u;
        nb += v * v;
    }
    (dot / (na * nb).sqrt()).clamp(-1.0, 1.0).acos()
}

/// Wolf's fixed-evolution-time method on a single fiducial trajectory.
///
/// The pair is evolved `evolve_steps` at a time and its log stretch
/// accumulated. Once the separation exceeds `scale_max` (or the neighbour
/// runs out of data) it is replaced by the closest point within
/// [scale_min, scale_max] whose direction from the fiducial point is within
/// the current orientation limit of the old neighbour's.
pub fn lye_wolf(x: &[f64], params: &WolfParams) -> Result<WolfResult> {
    let emb = params.embedding;
    let rate = check_rate(params.sample_rate_hz)?;
    let evolve = params.evolve_steps;
    if evolve == 0 {
        return Err(Error::InvalidParameter("evolve_steps must be ≥ 1".into()));
    }
    if !(params.scale_min > 0.0 && params.scale_min < params.scale_max) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < scale_min < scale_max, got {} and {}",
            params.scale_min, params.scale_max
        )));
    }
    ensure_len(x.len(), emb.window() + MIN_REFERENCE_POINTS)?;
    let m = emb.points(x.len());
    let period = resolve_period(x, params.mean_period)?;
    let (lo, hi) = min_max(x);
    let extent = hi - lo;
    if !(extent > 0.0) {
        return Err(Error::DegenerateSeries);
    }
    let (smin, smax) = (params.scale_min * extent, params.scale_max * extent);
    let (smin2, smax2) = (smin * smin, smax * smax);

    let view = DelayView::new(x, emb.tau, emb.dim, m);
    let index = SortedIndex::new(view);
    let usable = |i: usize, j: usize| (i.abs_diff(j) as f64) > period && j + evolve < m;

    let mut fid = 0usize;
    let first = index.nearest(fid, |j| usable(fid, j) && view.sq_dist(fid, j) >= smin2, false);
    let Some((mut nb, d2)) = first else {
        return Err(Error::NoValidNeighbors);
    };
    let mut d_before = d2.sqrt();
    let mut stretch = Vec::new();
    let mut replacements = 0;
    let mut steps = 0;

    while fid + evolve < m {
        let (f2, n2) = (fid + evolve, nb + evolve);
        let d_after = view.sq_dist(f2, n2).sqrt();
        if d_after > 0.0 {
            stretch.push((d_after / d_before).ln());
            steps += evolve;
        }
        fid = f2;
        if fid + evolve >= m {
            break;
        }
        if d_after > smax || d_after == 0.0 || n2 + evolve >= m {
            let candidates: Vec<(usize, f64)> = index
                .within_first_coord(fid, smax)
                .into_iter()
                .filter(|&j| usable(fid, j))
                .map(|j| (j, view.sq_dist(fid, j)))
                .filter(|&(_, d2)| (smin2..=smax2).contains(&d2))
                .collect();
            let pick = ANGLE_PASSES.iter().find_map(|&limit| {
                candidates
                    .iter()
                    .filter(|&&(j, _)| d_after == 0.0 || angle(&view, fid, j, n2) <= limit)
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            });
            let Some(&(j, d2)) = pick else {
                return Err(Error::NoReplacementFound);
            };
            nb = j;
            d_before = d2.sqrt();
            replacements += 1;
        } else {
            nb = n2;
            d_before = d_after;
        }
    }
    if steps == 0 {
        return Err(Error::NoValidNeighbors);
    }
    Ok(WolfResult {
        largest_exponent: pairwise_sum(&stretch) / steps as f64 * rate,
        replacements,
        evolution_steps: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_period_of_a_sine() {
        let x: Vec<f64> = (0..4096).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 64.0).sin()).collect();
        assert!((mean_period(&x).unwrap() - 64.0).abs() < 1e-6);
        assert_eq!(mean_period(&[1.0; 64]), Err(Error::DegenerateSeries));
    }

    #[test]
    fn slope_windows() {
        let c: Vec<f64> = (0..10).map(|k| 2.0 * k as f64 + 1.0).collect();
        assert!((slope(&c, (0, 9)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(slope(&c, (3, 3)), None);
        assert_eq!(slope(&c, (3, 10)), None);
    }

    #[test]
    fn too_short() {
        let emb = EmbeddingParams::new(1, 2).unwrap();
        let p = RosensteinParams { embedding: emb, mean_period: MeanPeriod::Samples(2.0), max_steps: Some(10), sample_rate_hz: None };
        assert!(matches!(lye_rosenstein(&[0.0; 105], &p), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(lye_wolf(&[0.0; 50], &WolfParams::new(emb)), Err(Error::SeriesTooShort { .. })));
    }
}
