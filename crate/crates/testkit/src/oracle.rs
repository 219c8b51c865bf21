//! Brute-force direct-definition reference implementations.

use std::collections::BTreeMap;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (N − 1 denominator), two-pass.
pub fn std_dev(x: &[f64]) -> f64 {
    let mu = mean(x);
    let ss: f64 = x.iter().map(|v| (v - mu) * (v - mu)).sum();
    (ss / (x.len() as f64 - 1.0)).sqrt()
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn tolerance(r: f64, sd: f64) -> f64 {
    (r * sd).max(1e-12)
}

// ---------------------------------------------------------------- AMI

fn bin_of(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let b = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
    b.min(bins - 1)
}

/// Mutual information (nats) between x[t] and y[t+lag] from an equal-width
/// joint histogram, marginals taken from the same pairs.
pub fn histogram_mi(x: &[f64], y: &[f64], lag: usize, bins: usize) -> f64 {
    let (xlo, xhi) = min_max(x);
    let (ylo, yhi) = min_max(y);
    let pairs = x.len() - lag;
    let mut joint = vec![vec![0usize; bins]; bins];
    for t in 0..pairs {
        let i = bin_of(x[t], xlo, xhi, bins);
        let j = bin_of(y[t + lag], ylo, yhi, bins);
        joint[i][j] += 1;
    }
    let n = pairs as f64;
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum::<usize>() as f64 / n).collect();
    let py: Vec<f64> = (0..bins)
        .map(|j| joint.iter().map(|r| r[j]).sum::<usize>() as f64 / n)
        .collect();
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            if joint[i][j] > 0 {
                let p = joint[i][j] as f64 / n;
                mi += p * (p / (px[i] * py[j])).ln();
            }
        }
    }
    mi
}

pub fn histogram_entropy(x: &[f64], bins: usize) -> f64 {
    let (lo, hi) = min_max(x);
    let mut counts = vec![0usize; bins];
    for &v in x {
        counts[bin_of(v, lo, hi, bins)] += 1;
    }
    shannon(&counts)
}

/// First ℓ ≥ 1 with c[ℓ−1] > c[ℓ] ≤ c[ℓ+1].
pub fn first_local_minimum(curve: &[f64]) -> Option<usize> {
    (1..curve.len().saturating_sub(1)).find(|&l| curve[l - 1] > curve[l] && curve[l] <= curve[l + 1])
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn shannon(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let n = total as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

// ---------------------------------------------------------------- FNN

/// Kennel false-nearest-neighbour fraction at dimension `dim`, exhaustive
/// neighbour search with |i − j| > tau exclusion.
pub fn fnn_fraction(x: &[f64], tau: usize, dim: usize, r_tol: f64, a_tol: f64) -> f64 {
    let n = x.len() - dim * tau;
    let sd = std_dev(x);
    let mut false_count = 0usize;
    for i in 0..n {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for j in 0..n {
            if i.abs_diff(j) <= tau {
                continue;
            }
            let d2: f64 = (0..dim)
                .map(|k| {
                    let d = x[i + k * tau] - x[j + k * tau];
                    d * d
                })
                .sum();
            if d2 < best {
                best = d2;
                best_j = j;
            }
        }
        let rd = best.sqrt();
        let extra = (x[i + dim * tau] - x[best_j + dim * tau]).abs();
        let ratio_false = if rd > 0.0 { extra / rd > r_tol } else { extra > 0.0 };
        let new_dist = (best + extra * extra).sqrt();
        if ratio_false || new_dist / sd > a_tol {
            false_count += 1;
        }
    }
    false_count as f64 / n as f64
}

// ---------------------------------------------------------------- entropy

fn cheb_match(a: &[f64], i: usize, b: &[f64], j: usize, len: usize, tol: f64) -> bool {
    (0..len).all(|k| (a[i + k] - b[j + k]).abs() <= tol)
}

/// Match counts (A, B) and −ln(A/B); templates i in 0..N−m, self-matches excluded.
pub fn sample_entropy(x: &[f64], m: usize, r: f64) -> (u64, u64, Option<f64>) {
    sample_entropy_abs(x, m, tolerance(r, std_dev(x)))
}

pub fn sample_entropy_abs(x: &[f64], m: usize, tol: f64) -> (u64, u64, Option<f64>) {
    let n = x.len() - m;
    let (mut a, mut b) = (0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            if cheb_match(x, i, x, j, m, tol) {
                b += 1;
                if cheb_match(x, i, x, j, m + 1, tol) {
                    a += 1;
                }
            }
        }
    }
    let v = if a == 0 || b == 0 { None } else { Some(-(a as f64 / b as f64).ln()) };
    (a, b, v)
}

fn phi(x: &[f64], y: &[f64], len: usize, tol: f64) -> f64 {
    let n = x.len() - len + 1;
    let mut acc = 0.0;
    for i in 0..n {
        let c = (0..n).filter(|&j| cheb_match(x, i, y, j, len, tol)).count().max(1);
        acc += (c as f64 / n as f64).ln();
    }
    acc / n as f64
}

/// Pincus ApEn with self-matches, tolerance r·std on the raw series.
pub fn approximate_entropy(x: &[f64], m: usize, r: f64) -> f64 {
    let tol = tolerance(r, std_dev(x));
    phi(x, x, m, tol) - phi(x, x, m + 1, tol)
}

fn zscore(x: &[f64]) -> Vec<f64> {
    let mu = mean(x);
    let sd = std_dev(x);
    if sd > 0.0 {
        x.iter().map(|v| (v - mu) / sd).collect()
    } else {
        x.iter().map(|v| v - mu).collect()
    }
}

/// Cross-ApEn on independently z-scored series; zero counts floored at one.
pub fn cross_approximate_entropy(x: &[f64], y: &[f64], m: usize, r: f64) -> f64 {
    let zx = zscore(x);
    let zy = zscore(y);
    let tol = r.max(1e-12);
    phi(&zx, &zy, m, tol) - phi(&zx, &zy, m + 1, tol)
}

/// Ordinal pattern entropy (raw nats, normalised); ties rank by index.
pub fn permutation_entropy(x: &[f64], m: usize, tau: usize) -> (f64, f64) {
    let windows = x.len() - (m - 1) * tau;
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for i in 0..windows {
        let w: Vec<f64> = (0..m).map(|k| x[i + k * tau]).collect();
        let ranks: Vec<usize> = (0..m)
            .map(|a| (0..m).filter(|&b| w[b] < w[a] || (w[b] == w[a] && b < a)).count())
            .collect();
        *counts.entry(ranks).or_default() += 1;
    }
    let c: Vec<usize> = counts.into_values().collect();
    let h = shannon(&c);
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    (h, h / fact.ln())
}

/// Miller–Madow corrected Shannon entropy of binary words, normalised by the
/// corrected entropy of the uniform distribution over all 2^L words.
pub fn symbolic_entropy(x: &[f64], threshold: f64, word_length: usize) -> f64 {
    let bits: Vec<char> = x.iter().map(|&v| if v > threshold { '1' } else { '0' }).collect();
    let mut words: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..=(bits.len() - word_length) {
        let w: String = bits[i..i + word_length].iter().collect();
        *words.entry(w).or_default() += 1;
    }
    let total = (bits.len() - word_length + 1) as f64;
    let counts: Vec<usize> = words.values().copied().collect();
    let cse = shannon(&counts) + (counts.len() as f64 - 1.0) / (2.0 * total);
    let m = 2f64.powi(word_length as i32);
    let cse_max = m.ln() + (m - 1.0) / (2.0 * total);
    cse / cse_max
}

pub fn coarse_grain(x: &[f64], scale: usize, offset: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = offset;
    while start + scale <= x.len() {
        out.push(x[start..start + scale].iter().sum::<f64>() / scale as f64);
        start += scale;
    }
    out
}

/// Fuzzy entropy with exp(−(d/tol)²) membership and per-template mean removal.
pub fn fuzzy_entropy_abs(x: &[f64], m: usize, tol: f64) -> Option<f64> {
    let n = x.len() - m;
    let phi = |len: usize| -> f64 {
        let templates: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mu = x[i..i + len].iter().sum::<f64>() / len as f64;
                x[i..i + len].iter().map(|v| v - mu).collect()
            })
            .collect();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = (0..len)
                    .map(|k| (templates[i][k] - templates[j][k]).abs())
                    .fold(0.0, f64::max);
                total += (-(d / tol).powi(2)).exp();
            }
        }
        total / (n as f64 * (n as f64 - 1.0))
    };
    let (pm, pm1) = (phi(m), phi(m + 1));
    if pm > 0.0 && pm1 > 0.0 {
        Some(pm.ln() - pm1.ln())
    } else {
        None
    }
}

// ---------------------------------------------------------------- DFA

/// Least-squares polynomial residual sum of squares via normal equations
/// solved by Gaussian elimination.
fn poly_rss(y: &[f64], order: usize) -> f64 {
    let n = y.len();
    let p = order + 1;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
    let mut a = vec![vec![0.0; p + 1]; p];
    for r in 0..p {
        for c in 0..p {
            a[r][c] = xs.iter().map(|x| x.powi((r + c) as i32)).sum();
        }
        a[r][p] = xs.iter().zip(y).map(|(x, v)| x.powi(r as i32) * v).sum();
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for row in 0..p {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=p {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..p).map(|r| a[r][p] / a[r][r]).collect();
    xs.iter()
        .zip(y)
        .map(|(x, v)| {
            let fit: f64 = coef.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum();
            (v - fit) * (v - fit)
        })
        .sum()
}

/// F(n): profile of the mean-removed series, non-overlapping boxes taken
/// from both ends, polynomial detrend per box, RMS over all boxes.
pub fn dfa_fluctuation(x: &[f64], box_size: usize, order: usize) -> f64 {
    let mu = mean(x);
    let mut acc = 0.0;
    let profile: Vec<f64> = x
        .iter()
        .map(|v| {
            acc += v - mu;
            acc
        })
        .collect();
    let n = profile.len();
    let boxes = n / box_size;
    let mut rss = 0.0;
    for b in 0..boxes {
        rss += poly_rss(&profile[b * box_size..(b + 1) * box_size], order);
    }
    for b in 0..boxes {
        let end = n - b * box_size;
        rss += poly_rss(&profile[end - box_size..end], order);
    }
    (rss / (2 * boxes * box_size) as f64).sqrt()
}

pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------- RQA

#[derive(Clone, Copy, Debug)]
pub enum Norm {
    Euclidean,
    Chebyshev,
    Manhattan,
}

pub fn distance(a: &[f64], b: &[f64], norm: Norm) -> f64 {
    match norm {
        Norm::Euclidean => a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt(),
        Norm::Chebyshev => a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
        Norm::Manhattan => a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum(),
    }
}

/// Full n×n recurrence matrix; cells inside the Theiler band are false
/// except the main diagonal when the window is zero.
pub fn recurrence_matrix(points: &[Vec<f64>], radius: f64, norm: Norm, theiler: usize) -> Vec<Vec<bool>> {
    let n = points.len();
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let off = i.abs_diff(j);
            m[i][j] = if off > theiler || (theiler == 0 && off == 0) {
                distance(&points[i], &points[j], norm) <= radius
            } else {
                false
            };
        }
    }
    m
}

pub fn recurrence_rate(m: &[Vec<bool>], theiler: usize) -> f64 {
    let n = m.len();
    let (mut hits, mut cells) = (0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > theiler {
                cells += 1;
                hits += m[i][j] as u64;
            }
        }
    }
    100.0 * hits as f64 / cells as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineScan {
    pub recurrence_rate_pct: f64,
    pub determinism_pct: f64,
    pub max_diagonal_line: usize,
    pub mean_diagonal_line: f64,
    pub diagonal_entropy: f64,
    pub laminarity_pct: f64,
    pub trapping_time: Option<f64>,
    pub max_vertical_line: usize,
}

fn runs(cells: impl Iterator<Item = bool>, hist: &mut BTreeMap<usize, u64>) {
    let mut run = 0;
    for c in cells {
        if c {
            run += 1;
        } else if run > 0 {
            *hist.entry(run).or_default() += 1;
            run = 0;
        }
    }
    if run > 0 {
        *hist.entry(run).or_default() += 1;
    }
}

/// Line statistics over the full matrix, both triangles, band excluded.
pub fn line_scan(m: &[Vec<bool>], theiler: usize, l_min: usize, v_min: usize) -> LineScan {
    let n = m.len();
    let band = |i: usize, j: usize| i.abs_diff(j) <= theiler;
    let cell = |i: usize, j: usize| !band(i, j) && m[i][j];

    let mut diag = BTreeMap::new();
    for k in 1..n {
        runs((0..n - k).map(|i| cell(i, i + k)), &mut diag);
        runs((0..n - k).map(|i| cell(i + k, i)), &mut diag);
    }
    let mut vert = BTreeMap::new();
    for j in 0..n {
        runs((0..n).map(|i| cell(i, j)), &mut vert);
    }
    let points: u64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| cell(i, j)).count() as u64;

    let weighted = |h: &BTreeMap<usize, u64>, min: usize| -> (u64, u64) {
        h.iter()
            .filter(|(&l, _)| l >= min)
            .fold((0, 0), |(s, c), (&l, &k)| (s + l as u64 * k, c + k))
    };
    let (dsum, dcount) = weighted(&diag, l_min);
    let (vsum, vcount) = weighted(&vert, v_min);
    let pct = |a: u64| if points == 0 { 0.0 } else { 100.0 * a as f64 / points as f64 };
    let entropy = if dcount == 0 {
        0.0
    } else {
        -diag
            .iter()
            .filter(|(&l, _)| l >= l_min)
            .map(|(_, &k)| {
                let p = k as f64 / dcount as f64;
                p * p.ln()
            })
            .sum::<f64>()
    };
    LineScan {
        recurrence_rate_pct: recurrence_rate(m, theiler),
        determinism_pct: pct(dsum),
        max_diagonal_line: diag.keys().next_back().copied().unwrap_or(0),
        mean_diagonal_line: if dcount == 0 { 0.0 } else { dsum as f64 / dcount as f64 },
        diagonal_entropy: entropy,
        laminarity_pct: pct(vsum),
        trapping_time: if vcount == 0 { None } else { Some(vsum as f64 / vcount as f64) },
        max_vertical_line: vert.keys().next_back().copied().unwrap_or(0),
    }
}

/// Entropy of the 64-bin histogram of per-point strengths Σ_j exp(−d_ij)
/// over off-band partners j.
pub fn weighted_recurrence_entropy(points: &[Vec<f64>], norm: Norm, theiler: usize) -> f64 {
    let n = points.len();
    let s: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| i.abs_diff(j) > theiler)
                .map(|j| (-distance(&points[i], &points[j], norm)).exp())
                .sum()
        })
        .collect();
    let (lo, hi) = min_max(&s);
    if !(hi > lo) {
        return 0.0;
    }
    let mut counts = vec![0usize; 64];
    for v in s {
        counts[bin_of(v, lo, hi, 64)] += 1;
    }
    shannon(&counts)
}
