use rayon::prelude::*;

use super::{check_m_r, TOLERANCE_FLOOR};
use crate::error::{ensure_len, Error, Result};
use crate::numeric::{mean, pairwise_sum, std_dev};

/// Approximate entropy φ_m − φ_{m+1} (Pincus), self-matches included.
///
/// Computed as the cross estimator of the series against itself, so
/// `approximate_entropy(x) == cross_approximate_entropy(x, x)` holds exactly.
pub fn approximate_entropy(x: &[f64], m: usize, r: f64) -> Result<f64> {
    cross_approximate_entropy(x, x, m, r)
}

/// Cross approximate entropy: x-templates matched against y-templates.
///
/// Both series are z-scored independently, so `r` is in standard-deviation
/// units of each. A template with no match is counted as one match, which
/// keeps the logarithm finite for asynchronous pairs.
pub fn cross_approximate_entropy(x: &[f64], y: &[f64], m: usize, r: f64) -> Result<f64> {
    check_m_r(m, r)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    ensure_len(x.len(), m + 2)?;
    let zx = standardize(x);
    let zy = if std::ptr::eq(x, y) { zx.clone() } else { standardize(y) };
    let tol = r.max(TOLERANCE_FLOOR);
    let (cm, cm1) = cross_counts(&zx, &zy, m, tol);
    Ok(phi(&cm) - phi(&cm1))
}

fn standardize(x: &[f64]) -> Vec<f64> {
    let mu = mean(x);
    let sd = std_dev(x);
    if sd > 0.0 {
        x.iter().map(|v| (v - mu) / sd).collect()
    } else {
        x.iter().map(|v| v - mu).collect()
    }
}

fn phi(counts: &[u32]) -> f64 {
    let n = counts.len() as f64;
    let logs: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64 / n).ln()).collect();
    pairwise_sum(&logs) / n
}

/// Per x-template match counts at lengths m (N − m + 1 templates) and m + 1
/// (N − m templates).
fn cross_counts(x: &[f64], y: &[f64], m: usize, tol: f64) -> (Vec<u32>, Vec<u32>) {
    let n = x.len();
    let nm = n - m + 1;
    let mut order: Vec<u32> = (0..nm as u32).collect();
    order.sort_by(|&a, &b| y[a as usize].total_cmp(&y[b as usize]).then(a.cmp(&b)));

    let counts: Vec<(u32, u32)> = (0..nm)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let xi = x[i];
            // |xi − y| is unimodal in y, so both ends are partition points
            let lo = order.partition_point(|&j| {
                let v = y[j as usize];
                v < xi && xi - v > tol
            });
            let hi = order.partition_point(|&j| {
                let v = y[j as usize];
                v <= xi || v - xi <= tol
            });
            let (mut c, mut c1) = (0u32, 0u32);
            for &j in &order[lo..hi] {
                let j = j as usize;
                if (1..m).all(|k| (x[i + k] - y[j + k]).abs() <= tol) {
                    c += 1;
                    if i + m < n && j + m < n && (x[i + m] - y[j + m]).abs() <= tol {
                        c1 += 1;
                    }
                }
            }
            (c, c1)
        })
        .collect();
    let cm = counts.iter().map(|c| c.0).collect();
    let cm1 = counts[..nm - 1].iter().map(|c| c.1).collect();
    (cm, cm1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_zero() {
        assert_eq!(approximate_entropy(&[0.1; 64], 2, 0.2).unwrap(), 0.0);
        assert_eq!(cross_approximate_entropy(&[5.0; 30], &[5.0; 30], 2, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn self_cross_identity() {
        let x: Vec<f64> = (0..300).map(|i| ((i * 37) % 17) as f64 + (i as f64 * 0.3).sin()).collect();
        assert_eq!(
            approximate_entropy(&x, 2, 0.2).unwrap(),
            cross_approximate_entropy(&x, &x.clone(), 2, 0.2).unwrap()
        );
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            cross_approximate_entropy(&[1.0; 10], &[1.0; 11], 2, 0.2),
            Err(Error::LengthMismatch(10, 11))
        );
    }
}
