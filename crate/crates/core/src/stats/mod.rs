//! Correlation machinery and the log-log scaling diagnostic.

mod loglog;
mod matrix;
mod pearson;

pub use loglog::{loglog_slope, LogLogFit};
pub use matrix::{correlation_matrix, correlation_matrix_from_columns, CorrelationMatrix};
pub use pearson::{pair_stats, pearson, PairStats, MIN_PAIRS};
