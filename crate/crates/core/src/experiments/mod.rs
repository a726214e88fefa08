//! Scenario configs, the built-in suite, the runner and report emission.

mod builtin;
mod config;
mod report;
mod runner;

pub use builtin::{builtin_series, parse_operators, BuiltinSeries, BUILTIN_SUITE};
pub use config::{
    parse_config, parse_depths, parse_norm, render, render_norm, Analysis, IntervalSpec,
    ScenarioConfig, DEFAULT_INTERVALS, DEFAULT_TAIL_DEPTHS, DEFAULT_TRIALS,
};
pub use report::{
    format_float, render_csv, AnalysisError, ReportRow, RunSummary, ScenarioSummary, CSV_HEADER,
};
pub use runner::{run_analysis, run_scenario, run_scenarios};
