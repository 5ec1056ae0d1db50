//! Configuration, the four subcommand pipelines and their output formats.
//!
//! Every run writes the effective `config.toml`, its outputs and a
//! `manifest.json` carrying the config hash and the in-run checks.

mod config;
mod output;
mod run;

pub use config::{
    BackgroundSection, EvolveSection, ExperimentConfig, GridSection, InitKind, LindecaySection,
    LyapunovSection, MagneticInit, ModelSection, StationarySection, TimeGrid,
};
pub use output::{
    emit_report, emit_series, emit_snapshot, emit_table, format_float, read_series, sha256_hex,
    write_atomic, Check, OutputRecord, RunManifest, SeriesRow, Status, SERIES_COLUMNS,
};
pub use run::{
    decay_fits, decay_requests, decay_trend, magnetic_targets, manifest_matches_config,
    run_experiment, Command, EvolveReport, LyapunovReport, StationaryReport, TrendReport,
    CONFIG_FILE, MANIFEST_FILE,
};
