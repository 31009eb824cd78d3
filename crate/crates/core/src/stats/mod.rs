//! Descriptive statistics, binning, Pearson correlation with significance,
//! and sample filtering.

mod binning;
mod correlation;
mod filter;
mod summary;

pub use binning::{histogram, BinCount, BinSpec, Histogram};
pub use correlation::{
    correlation_matrix, pearson, pearson_values, Column, CorrelationCell, CorrelationMatrix,
    MatrixEntry,
};
pub use filter::{category_counts, quartile_filter, CategoryCount, Quartiles, Variable};
pub use summary::{summarize, SampleSummary};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("insufficient n: {n} paired observations, need at least {needed}")]
    InsufficientData { n: usize, needed: usize },
    #[error("undefined correlation: constant series")]
    UndefinedCorrelation,
    #[error("invalid bins: {0}")]
    InvalidBins(String),
    #[error("sort key undefined for video {0}")]
    UndefinedKey(String),
}

/// Defined observations only; NaN counts as absent.
pub(crate) fn defined(values: &[Option<f64>]) -> impl Iterator<Item = f64> + '_ {
    values.iter().filter_map(|v| v.filter(|x| !x.is_nan()))
}
