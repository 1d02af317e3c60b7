//! Configuration, sweeps, figure presets and table output behind the
//! `spinflip` binary.

pub mod config;
pub mod experiment;
pub mod sweep;
pub mod table;
pub mod units;

pub use config::{parse_config, parse_config_with_preset, ConfigError, Preset, RunContext};
pub use experiment::{load_experiment_points, overlay, DataError, ExperimentPoint};
pub use sweep::{run_single, run_sweep, ResultRow, ResultTable, SweepSpec, SweepVariable};
pub use table::{emit_table, parse_table_json, Format, TableError};
