//! Experiment orchestration: per-run splits and costs, cross-validated
//! parameter selection, test-set scoring and report emission.

pub mod config;
pub mod cv;
pub mod report;
pub mod run;
pub mod seed;

pub use config::{AlgorithmSpec, CostConfig, CostKind, Criterion, ExperimentConfig, Variant};
pub use cv::{cv_select, grid_for, GridPoint, RunData, Selection};
pub use report::{emit_report, parse_report_csv, Format, Report};
pub use run::{prepare_run, run_all, run_experiment, run_experiment_on, sweep_alpha, AlphaPoint};
pub use seed::derive_seed;
