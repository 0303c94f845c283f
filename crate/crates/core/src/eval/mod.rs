//! Top-N evaluation protocol, ranking metrics, significance tests and
//! multi-run reports.

mod metrics;
mod protocol;
mod ranking;
pub mod report;
mod stats;

pub use metrics::{ndcg_at, precision_at, Metric};
pub use protocol::{evaluate_method, MetricTable, Predictor, DEFAULT_CUTOFFS};
pub use ranking::rank_candidates;
pub use report::{aggregate_runs, improvement_pct, significance_stars, Cell, Comparison, EvalReport, Pairing, RunResult};
pub use stats::{paired_t_test, TTest};
