use rayon::prelude::*;

use super::Norm;
use crate::error::{Error, Result};
use crate::statespace::StateMatrix;

const MAX_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSearch {
    pub radius: f64,
    pub achieved_pct: f64,
    pub iterations: usize,
}

fn off_band_pairs(n: usize, w: usize) -> u64 {
    let (n, w) = (n as u64, w as u64);
    if n > w + 1 {
        (n - w - 1) * (n - w) / 2
    } else {
        0
    }
}

/// Off-band pairs (i < j − w) within `radius`.
fn count_within(points: &StateMatrix, norm: Norm, w: usize, radius: f64) -> u64 {
    let n = points.rows();
    (0..n)
        .into_par_iter()
        .with_min_len(16)
        .map(|i| {
            let pi = points.row(i);
            (i + w + 1..n).filter(|&j| norm.distance(pi, points.row(j)) <= radius).count() as u64
        })
        .sum()
}

/// Smallest and largest off-band distance.
fn distance_range(points: &StateMatrix, norm: Norm, w: usize) -> (f64, f64) {
    let n = points.rows();
    (0..n)
        .into_par_iter()
        .with_min_len(16)
        .map(|i| {
            let pi = points.row(i);
            (i + w + 1..n).fold((f64::INFINITY, 0.0f64), |(lo, hi), j| {
                let d = norm.distance(pi, points.row(j));
                (lo.min(d), hi.max(d))
            })
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)))
}

/// Radius whose recurrence rate (percent of off-band cells) is within
/// `tolerance_pct` of `target_pct`, by bisection on [0, max distance].
///
/// The rate is a step function of the radius; when no step lands within the
/// tolerance the closest radius found is reported in `Unreachable`.
pub fn radius_for_rate(
    points: &StateMatrix,
    target_pct: f64,
    norm: Norm,
    theiler: usize,
    tolerance_pct: f64,
) -> Result<RadiusSearch> {
    if !(target_pct > 0.0 && target_pct <= 100.0) {
        return Err(Error::InvalidParameter(format!("target rate {target_pct}% outside (0, 100]")));
    }
    if !(tolerance_pct > 0.0) {
        return Err(Error::InvalidParameter("rate tolerance must be positive".into()));
    }
    let total = off_band_pairs(points.rows(), theiler);
    if total == 0 {
        return Err(Error::EmptyStateMatrix);
    }
    let rate = |r: f64| 100.0 * count_within(points, norm, theiler, r) as f64 / total as f64;
    let (min_d, max_d) = distance_range(points, norm, theiler);
    if target_pct >= 100.0 {
        return Ok(RadiusSearch { radius: max_d, achieved_pct: 100.0, iterations: 0 });
    }

    let mut best = RadiusSearch { radius: max_d, achieved_pct: 100.0, iterations: 0 };
    let floor = rate(min_d);
    if floor > target_pct + tolerance_pct {
        return Err(Error::Unreachable { target: target_pct, closest_radius: min_d, closest_pct: floor });
    }
    if (floor - target_pct).abs() < (best.achieved_pct - target_pct).abs() {
        best = RadiusSearch { radius: min_d, achieved_pct: floor, iterations: 0 };
    }
    let (mut lo, mut hi) = (min_d, max_d);
    for it in 1..=MAX_ITERATIONS {
        if (best.achieved_pct - target_pct).abs() <= tolerance_pct {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let got = rate(mid);
        if (got - target_pct).abs() < (best.achieved_pct - target_pct).abs() {
            best = RadiusSearch { radius: mid, achieved_pct: got, iterations: it };
        }
        best.iterations = it;
        if got < target_pct {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.achieved_pct - target_pct).abs() <= tolerance_pct {
        Ok(best)
    } else {
        Err(Error::Unreachable {
            target: target_pct,
            closest_radius: best.radius,
            closest_pct: best.achieved_pct,
        })
    }
}
