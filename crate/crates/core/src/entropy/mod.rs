//! Regularity and complexity estimators.
//!
//! Tolerances `r` are fractions of the sample standard deviation of the
//! analysed series, floored at [`TOLERANCE_FLOOR`] so that constant series
//! produce their forced values instead of 0/0. Template distances are
//! Chebyshev (largest coordinate difference) throughout.

mod approximate;
mod multiscale;
mod permutation;
mod sample;
mod symbolic;

pub use approximate::{approximate_entropy, cross_approximate_entropy};
pub use multiscale::{
    coarse_grain, coarse_grain_offset, fuzzy_entropy, multiscale_entropy_plus, variance_coarse_grain,
    MultiscaleCurve, MultiscaleVariant,
};
pub use permutation::{permutation_entropy, PermutationEntropy};
pub use sample::{sample_entropy, sample_entropy_counts, MatchCounts};
pub use symbolic::{symbolic_entropy, Threshold};

use crate::error::{Error, Result};
use crate::numeric::std_dev;

pub const TOLERANCE_FLOOR: f64 = 1e-12;

/// Template length, tolerance fraction and ordinal lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyParams {
    pub m: usize,
    pub r: f64,
    pub tau: usize,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self { m: 2, r: 0.2, tau: 1 }
    }
}

pub(crate) fn check_m_r(m: usize, r: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("template length m must be ≥ 1".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance r={r} must be positive")));
    }
    Ok(())
}

/// Absolute tolerance `r·std(x)`, floored.
pub fn absolute_tolerance(x: &[f64], r: f64) -> f64 {
    (r * std_dev(x)).max(TOLERANCE_FLOOR)
}
