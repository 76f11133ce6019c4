//! Command-line front end for `kdebw`: bandwidth selection on sample files,
//! seeded validation experiments, density tables and sample generation.

pub mod args;
pub mod commands;
pub mod curves;
pub mod experiment;
pub mod input;
pub mod report;

pub use commands::Status;
pub use experiment::{run_experiment, run_one, Experiment, ExperimentOptions, RunOutcome, SampleData};
pub use report::{Aggregate, ExperimentDocument, ExperimentReport};
