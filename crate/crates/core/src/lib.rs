//! Nonlinear time-series analysis for gait and other physiological signals.
//!
//! All estimators take plain `&[f64]` slices. Loading, column selection and
//! NaN handling live in [`series`].

pub mod dfa;
pub mod entropy;
pub mod error;
pub mod lyapunov;
mod neighbors;
pub mod numeric;
pub mod rqa;
pub mod series;
pub mod statespace;

pub use error::{Error, Result};
pub use series::{load_dataset, AttributeList, Dataset, NanPolicy, TimeSeries};
pub use statespace::{embed, EmbeddingParams, StateMatrix};
