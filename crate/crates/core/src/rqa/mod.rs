//! Recurrence plots and recurrence quantification.
//!
//! A plot over n state-space points is stored as its upper triangle
//! (diagonal included), one bit per cell, each row padded to whole 64-bit
//! words: about n²/16 bytes. Cells within the Theiler window `w` of the main
//! diagonal are left unset, except the main diagonal itself when `w = 0`.
//! All measures are taken over cells with |i − j| > w and count both
//! triangles, so lines below the diagonal mirror those above it.

mod export;
mod measures;
mod plot;
mod radius;

pub use export::{read_rle, write_pgm, write_rle};
pub use measures::{quantify, RqaMeasures};
pub use plot::{estimate_plot_bytes, RecurrencePlot};
pub use radius::{radius_for_rate, RadiusSearch};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Norm {
    #[default]
    Euclidean,
    /// Largest coordinate difference.
    Chebyshev,
    /// Sum of absolute coordinate differences.
    Manhattan,
}

impl Norm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Norm::Euclidean => "euclidean",
            Norm::Chebyshev => "chebyshev",
            Norm::Manhattan => "manhattan",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            Norm::Euclidean => 0,
            Norm::Chebyshev => 1,
            Norm::Manhattan => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        [Norm::Euclidean, Norm::Chebyshev, Norm::Manhattan].into_iter().find(|n| n.code() == c)
    }

    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt(),
            Norm::Chebyshev => a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max),
            Norm::Manhattan => a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum(),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Norm::Euclidean),
            "chebyshev" | "max" | "linf" => Ok(Norm::Chebyshev),
            "manhattan" | "l1" => Ok(Norm::Manhattan),
            _ => Err(Error::InvalidParameter(format!("unknown norm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RqaParams {
    pub radius: f64,
    pub norm: Norm,
    /// Theiler window: cells with |i − j| ≤ w are excluded.
    pub theiler: usize,
    pub l_min: usize,
    pub v_min: usize,
    /// Also accumulate per-point strengths for the weighted recurrence entropy.
    pub weighted_entropy: bool,
}

impl RqaParams {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            norm: Norm::Euclidean,
            theiler: 0,
            l_min: 2,
            v_min: 2,
            weighted_entropy: true,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius {} must be finite and ≥ 0", self.radius)));
        }
        if self.l_min < 1 || self.v_min < 1 {
            return Err(Error::InvalidParameter("minimum line lengths must be ≥ 1".into()));
        }
        Ok(())
    }
}
