use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: PathBuf, reason: String },

    #[error("{0} is neither CSV nor Parquet")]
    UnknownFormat(PathBuf),

    #[error("dataset has no rows or no columns")]
    EmptyDataset,

    #[error("attribute list is empty")]
    EmptyAttributeList,

    #[error("attribute {0:?} listed twice")]
    DuplicateAttribute(String),

    #[error("column {0:?} not found")]
    MissingColumn(String),

    #[error("column {0:?} is not a finite numeric series")]
    NonNumericColumn(String),

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("permutation order {0} outside 2..=7")]
    InvalidOrder(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("state matrix has fewer than two points")]
    EmptyStateMatrix,

    #[error("recurrence plot needs ~{estimated} bytes, budget is {budget}")]
    MemoryBudgetExceeded { estimated: u64, budget: u64 },

    #[error(
        "recurrence rate {target}% unreachable; closest is {closest_pct}% at radius {closest_radius}"
    )]
    Unreachable {
        target: f64,
        closest_radius: f64,
        closest_pct: f64,
    },

    #[error("no valid neighbours outside the exclusion window")]
    NoValidNeighbors,

    #[error("no replacement neighbour within scale bounds")]
    NoReplacementFound,
}

impl Error {
    /// Variant name, used as the machine-readable reason in batch output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnreadableFile { .. } => "UnreadableFile",
            Error::UnknownFormat(_) => "UnknownFormat",
            Error::EmptyDataset => "EmptyDataset",
            Error::EmptyAttributeList => "EmptyAttributeList",
            Error::DuplicateAttribute(_) => "DuplicateAttribute",
            Error::MissingColumn(_) => "MissingColumn",
            Error::NonNumericColumn(_) => "NonNumericColumn",
            Error::SeriesTooShort { .. } => "SeriesTooShort",
            Error::DegenerateSeries => "DegenerateSeries",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::EmptyStateMatrix => "EmptyStateMatrix",
            Error::MemoryBudgetExceeded { .. } => "MemoryBudgetExceeded",
            Error::Unreachable { .. } => "Unreachable",
            Error::NoValidNeighbors => "NoValidNeighbors",
            Error::NoReplacementFound => "NoReplacementFound",
        }
    }
}

pub(crate) fn ensure_len(got: usize, needed: usize) -> Result<()> {
    if got < needed {
        Err(Error::SeriesTooShort { needed, got })
    } else {
        Ok(())
    }
}
