//! Experiment runner for the `lfsgd` optimizers: seeded single runs,
//! ρ × β sweeps and aligned optimizer comparisons, each writing CSV and
//! JSON artifacts.

pub mod compare;
pub mod config;
pub mod error;
pub mod runner;
pub mod sweep;

pub use compare::{compare_optimizers, ArmResult, Comparison};
pub use config::{MonitorSettings, RunConfig, MONITOR_NAMES};
pub use error::HarnessError;
pub use runner::{execute, run_single, write_record, Manifest, RunRecord, RunSummary, VERSION};
pub use sweep::{
    run_sweep, SweepCell, SweepGrid, SweepRow, SweepSummary, DEFAULT_BETAS, DEFAULT_RHOS,
};
