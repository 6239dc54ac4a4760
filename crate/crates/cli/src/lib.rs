//! Experiment catalog, batch execution and CSV output.

pub mod batch;
pub mod config;

pub use batch::{run_batch, write_csv, BatchOptions, ResultRow, RunRecord, CSV_HEADER};
pub use config::{load_config, preset, ConfigError, ExperimentConfig, InvocationKind, Preset};
