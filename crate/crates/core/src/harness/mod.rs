//! Experiment driver, bound comparison and the file formats used by the CLI.

pub mod config;
pub mod experiment;
pub mod files;
pub mod report;
pub mod sweep;

pub use config::{ExperimentConfig, InstanceSpec, Scheme};
pub use experiment::{run_experiment, Experiment, SummaryStats, TrialRecord};
pub use files::{PriorFile, Role};
pub use report::{redundancy_report, RedundancyReport};
pub use sweep::{sweep, SweepRow, SweepTable};
