//! Experiment harness: JSON configuration, sweep execution, CSV and SVG
//! emission, and the validation suite behind the `qpolar` CLI.

pub mod config;
pub mod plot;
pub mod sweep;
pub mod validate;

pub use config::{
    ConvexAverage, DepolarizerConfig, ExperimentConfig, OutputsConfig, PipelineConfig, ProbeConfig,
};
pub use plot::emit_plot;
pub use sweep::{evaluate_grid_point, run_sweep, write_csv, RowStatus, SweepRow};
pub use validate::{run_validation, CheckResult, ValidationReport};
