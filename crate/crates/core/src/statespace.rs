//! State-space reconstruction: delay embedding, time lag from average mutual
//! information, embedding dimension from false nearest neighbours.

use rayon::prelude::*;

use crate::error::{ensure_len, Error, Result};
use crate::neighbors::{DelayView, SortedIndex};
use crate::numeric::{min_max, std_dev};

/// Time lag (samples) and embedding dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmbeddingParams {
    pub tau: usize,
    pub dim: usize,
}

impl EmbeddingParams {
    pub fn new(tau: usize, dim: usize) -> Result<Self> {
        if tau == 0 || dim == 0 {
            return Err(Error::InvalidParameter(format!("tau={tau} dim={dim}; both must be ≥ 1")));
        }
        Ok(Self { tau, dim })
    }

    /// Samples spanned by one delay vector.
    pub fn window(&self) -> usize {
        (self.dim - 1) * self.tau + 1
    }

    /// Number of delay vectors obtainable from `len` samples.
    pub fn points(&self, len: usize) -> usize {
        len.saturating_sub((self.dim - 1) * self.tau)
    }
}

/// Row-major matrix of state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl StateMatrix {
    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter(format!(
                "{} values do not form rows of width {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::from_flat(rows.concat(), dim)
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn reversed(&self) -> Self {
        let data = self.data.chunks_exact(self.dim).rev().flatten().copied().collect();
        Self { dim: self.dim, data }
    }
}

/// Row i is `(x[i], x[i+tau], …, x[i+(dim−1)tau])`.
pub fn embed(x: &[f64], params: EmbeddingParams) -> Result<StateMatrix> {
    ensure_len(x.len(), params.window())?;
    let rows = params.points(x.len());
    let mut data = Vec::with_capacity(rows * params.dim);
    for i in 0..rows {
        data.extend((0..params.dim).map(|k| x[i + k * params.tau]));
    }
    StateMatrix::from_flat(data, params.dim)
}

/// Mutual information per lag.
#[derive(Debug, Clone, PartialEq)]
pub struct AmiCurve {
    pub lags: Vec<usize>,
    /// Nats.
    pub ami: Vec<f64>,
    /// First local minimum, or the last lag when the curve has none.
    pub selected_lag: usize,
    pub found_minimum: bool,
}

pub const DEFAULT_AMI_BINS: usize = 16;

fn bin_indices(x: &[f64], bins: usize) -> Result<Vec<u16>> {
    let (lo, hi) = min_max(x);
    if !(hi > lo) {
        return Err(Error::DegenerateSeries);
    }
    let width = hi - lo;
    Ok(x.iter()
        .map(|&v| (((v - lo) / width * bins as f64).floor() as usize).min(bins - 1) as u16)
        .collect())
}

/// Average mutual information between `x[t]` and `y[t+ℓ]` for ℓ in
/// `0..=max_lag`, from equal-width `n_bins × n_bins` joint histograms.
pub fn ami(x: &[f64], y: &[f64], max_lag: usize, n_bins: usize) -> Result<AmiCurve> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if !(2..=u16::MAX as usize).contains(&n_bins) {
        return Err(Error::InvalidParameter(format!("n_bins={n_bins}")));
    }
    ensure_len(x.len(), 4 * n_bins)?;
    if 2 * max_lag >= x.len() {
        return Err(Error::InvalidParameter(format!(
            "max_lag={max_lag} must be below half the series length {}",
            x.len()
        )));
    }
    let bx = bin_indices(x, n_bins)?;
    let by = bin_indices(y, n_bins)?;

    let ami: Vec<f64> = (0..=max_lag)
        .into_par_iter()
        .map(|lag| mutual_information(&bx, &by[lag..], n_bins))
        .collect();
    let found = first_local_minimum(&ami);
    Ok(AmiCurve {
        lags: (0..=max_lag).collect(),
        selected_lag: found.unwrap_or(max_lag),
        found_minimum: found.is_some(),
        ami,
    })
}

/// AMI of a series against itself.
pub fn self_ami(x: &[f64], max_lag: usize, n_bins: usize) -> Result<AmiCurve> {
    ami(x, x, max_lag, n_bins)
}

fn mutual_information(bx: &[u16], by: &[u16], bins: usize) -> f64 {
    let pairs = by.len();
    let mut joint = vec![0u32; bins * bins];
    for (a, b) in bx.iter().zip(by) {
        joint[*a as usize * bins + *b as usize] += 1;
    }
    let mut px = vec![0u64; bins];
    let mut py = vec![0u64; bins];
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j] as u64;
            px[i] += c;
            py[j] += c;
        }
    }
    let n = pairs as f64;
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c > 0 {
                let p = c as f64 / n;
                mi += p * (p / ((px[i] as f64 / n) * (py[j] as f64 / n))).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Smallest ℓ ≥ 1 with `c[ℓ−1] > c[ℓ] ≤ c[ℓ+1]`.
pub fn first_local_minimum(curve: &[f64]) -> Option<usize> {
    (1..curve.len().saturating_sub(1)).find(|&l| curve[l - 1] > curve[l] && curve[l] <= curve[l + 1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnnParams {
    pub max_dim: usize,
    /// Distance-ratio threshold on the added coordinate.
    pub r_tol: f64,
    /// Attractor-size threshold, in units of the series standard deviation.
    pub a_tol: f64,
    /// A dimension is accepted once its false fraction drops below this.
    pub drop_threshold: f64,
}

impl Default for FnnParams {
    fn default() -> Self {
        Self {
            max_dim: 10,
            r_tol: 15.0,
            a_tol: 2.0,
            drop_threshold: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnnCurve {
    pub dims: Vec<usize>,
    pub fnn_fraction: Vec<f64>,
    pub selected_dim: usize,
    /// False when no dimension fell below the drop threshold.
    pub converged: bool,
}

/// False nearest neighbours (Kennel et al.) for dims `1..=max_dim`.
///
/// At dimension d every delay vector that can be extended by one more
/// coordinate gets its nearest neighbour (temporal neighbours within `tau`
/// excluded). The pair is false when the extra coordinate's separation over
/// the d-dimensional distance exceeds `r_tol`, or the (d+1)-dimensional
/// distance exceeds `a_tol` standard deviations.
pub fn fnn(x: &[f64], tau: usize, params: FnnParams) -> Result<FnnCurve> {
    if tau == 0 || params.max_dim == 0 {
        return Err(Error::InvalidParameter("tau and max_dim must be ≥ 1".into()));
    }
    ensure_len(x.len(), params.max_dim * tau + 2)?;
    let sd = std_dev(x);
    if sd == 0.0 {
        return Err(Error::DegenerateSeries);
    }

    let mut fractions = Vec::with_capacity(params.max_dim);
    for dim in 1..=params.max_dim {
        let n = x.len() - dim * tau;
        let index = SortedIndex::new(DelayView::new(x, tau, dim, n));
        let verdicts: Vec<Option<bool>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (j, d2) = index.nearest(i, |j| i.abs_diff(j) > tau, false)?;
                let rd = d2.sqrt();
                let extra = (x[i + dim * tau] - x[j + dim * tau]).abs();
                let ratio_false = if rd > 0.0 { extra / rd > params.r_tol } else { extra > 0.0 };
                let size_false = (d2 + extra * extra).sqrt() / sd > params.a_tol;
                Some(ratio_false || size_false)
            })
            .collect();
        if verdicts.iter().any(Option::is_none) {
            return Err(Error::NoValidNeighbors);
        }
        let false_count = verdicts.iter().filter(|v| **v == Some(true)).count();
        fractions.push(false_count as f64 / n as f64);
    }
    let hit = fractions.iter().position(|&f| f < params.drop_threshold);
    Ok(FnnCurve {
        dims: (1..=params.max_dim).collect(),
        selected_dim: hit.map_or(params.max_dim, |p| p + 1),
        converged: hit.is_some(),
        fnn_fraction: fractions,
    })
}
