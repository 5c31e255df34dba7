//! Paired nonparametric comparison of final results.

mod compare;
mod wilcoxon;

pub use compare::{compare_tables, format_sci, ComparisonReport, ComparisonRow, PairTest, RunResult, SummaryCell};
pub use wilcoxon::{
    exact_p_value, rank_sums, sample_sd, wilcoxon_signed_rank, WilcoxonOutcome, WilcoxonResult, ALPHA, EXACT_MAX_N, MIN_EFFECTIVE,
};
