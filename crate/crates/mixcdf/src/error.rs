//! Library error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("record {index}: successes {successes} exceed trials {trials}")]
    SuccessesExceedTrials {
        index: usize,
        successes: u64,
        trials: u64,
    },

    #[error("record {index}: trial count must be positive")]
    ZeroTrials { index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid probability {value} for {name}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("mixing weights must be nonnegative and sum to 1 (sum = {sum})")]
    InvalidWeights { sum: f64 },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("grid must be strictly {order} in (0, 1)")]
    NonMonotoneGrid { order: &'static str },

    #[error("counts test requires a common trial size; dataset mixes m = {first} and m = {other}")]
    UnequalTrialSizes { first: u64, other: u64 },

    #[error("two-sided interval is empty: [{lower}, 1] does not intersect [0, {upper}]")]
    EmptyIntersection { lower: f64, upper: f64 },

    #[error("dataset of size {size} is too small to split off a calibration subset")]
    SplitTooSmall { size: usize },

    #[error("shift {rho} is not a multiple of the partition spacing {spacing}")]
    RhoNotGridAligned { rho: f64, spacing: f64 },

    #[error("leaf weights are all zero: no leaf is compatible with the record")]
    ZeroWeightRow,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
