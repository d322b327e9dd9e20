//! Win tables, rank correlations and the Elo-versus-Bradley–Terry comparison.

mod comparison;
mod correlation;
pub mod export;
mod summary;

pub use comparison::{fit_log, method_comparison, ComparisonRow, CorrelationReport, MethodComparison};
pub use correlation::{
    kendall_tau, pearson_correlation, KendallTest, PValueMethod, EXACT_KENDALL_MAX_N,
};
pub use summary::{win_summary, WinLossSummary};
