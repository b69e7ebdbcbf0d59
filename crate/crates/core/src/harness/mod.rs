//! Monte-Carlo sweeps, result files, and reproduction of reference tables
//! and figures.

mod config;
mod curve;
mod output;
mod reproduce;
mod sweep;
mod validate;

pub use config::{parse_grid, DelayMode, SweepConfig, SINGLE_USER};
pub use curve::{wilson_interval, BerCurve, BerPoint, Z_95};
pub use output::{emit_results, render, to_csv, to_json, OutputFormat, CSV_HEADER};
pub use reproduce::{
    figure_preset, reproduce_figure, reproduce_table, trace_set_profile, FigureId, Panel, TableId, TableReport,
    TableRow, TRACE_SETS,
};
pub use sweep::{resolve_threads, run_sweep, SweepResult, BATCH, THREADS_ENV};
pub use validate::{run_validation, Check, ValidationReport};
