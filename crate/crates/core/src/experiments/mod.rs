//! Experiment harness: statistics, reporting artifacts, and the
//! configuration grid over a corpus.

mod grid;
mod report;
mod stats;

pub use grid::{
    aggregate_rows, comparison_rows, discover_corpus, run_grid, stats_csv, runs_csv, ComparisonRow, CorpusModule,
    GridConfig, GridError, RunRecord, COMPARISONS, CONFIGURATIONS,
};
pub use report::{
    distance_json, emit_timeline, parse_timeline, report_json, suite_sidecar, timeline_csv, timeline_rows,
    trace_json,
};
pub use stats::{compare, mann_whitney_u, median, vargha_delaney, ComparisonStats, EmptySample, EXACT_LIMIT};
