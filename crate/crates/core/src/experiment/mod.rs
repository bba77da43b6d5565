//! Config-driven scenario runner behind the command-line tool.

pub mod compare;
pub mod config;
pub mod csv;
pub mod presets;
pub mod runner;

pub use compare::{compare_runs, compare_tables, first_peak, CompareMode, CompareReport, Peak};
pub use config::{InitialState, ScenarioConfig};
pub use csv::{format_number, CsvTable, CSV_HEADER};
pub use presets::{list_presets, Preset, PRESETS};
pub use runner::{plan_runs, run_scenario, simulate, validate, RunOptions, RunPlan, RunResult, Row, ScenarioOutcome};
