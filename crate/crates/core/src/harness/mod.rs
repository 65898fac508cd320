//! Scenario files, experiment drivers, verification suites and output
//! serialization for the `peakon` CLI.

mod commands;
mod output;
mod scenario;
mod verify;

pub use commands::{cmd_approx, cmd_metric, cmd_simulate, default_kappa, log_slope, sample_rows};
pub use output::{ApproxRow, MetricRow, OutputRecord, SampleRow, Verdict};
pub use scenario::{ApproxSettings, Initial, MetricSettings, Scenario, SeedSuite, SCHEMA};
pub use verify::{cmd_verify, random_state, run_suite, SUITES};
