//! Configuration loading, seeded Monte-Carlo sweeps and CSV output.

pub mod config;
pub mod csv;
pub mod sweep;

pub use config::{parse_config, read_config};
pub use csv::{emit_csv, parse_trials_csv, CsvPaths, RawRow};
pub use sweep::{
    run_sweep, run_sweep_on, trial_seed, Aggregate, SweepConfig, SweepOutput, SweepVariable,
    TrialRecord,
};
