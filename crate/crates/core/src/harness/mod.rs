//! Seeded Monte Carlo experiments.
//!
//! An [`ExperimentConfig`] fully determines an [`ExperimentResult`]: each
//! grid cell `(beta, n)` gets its own seed derived from the master seed, and
//! each trial draws from fixed substreams of that seed (topology, channel,
//! priority), so the thread pool never affects the output.

mod config;
mod output;
mod presets;
mod run;

pub use config::{BudgetConfig, ExperimentConfig, ExperimentKind, NamedConstant, PriorityMode, TheoryConstant};
pub use output::{
    cdf_csv, config_hash, link_rows_csv, results_csv, summary_json, CDF_CSV_HEADER, GIT_REV, RESULTS_CSV_HEADER,
};
pub use presets::{preset, Preset, PRESETS};
pub use run::{
    mean_stderr, run_experiment, run_experiment_with, run_fraction_vs_n, run_gap_vs_n, run_link_rate_cdf,
    run_sum_rate_sweep, run_theory_curves, CdfSeries, Execution, ExperimentResult, ResultRow,
};
