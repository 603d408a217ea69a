//! Seeded, parallel Monte Carlo harness: confidence statistics, the report
//! container, and the headline experiments (cluster-density estimate,
//! exit-time tails, tail factorizations, and the `(ln n)²` scaling scan).

pub mod experiments;
pub mod report;
pub mod stats;

pub use experiments::{estimate_theta, scaling_scan, tail_exit, tail_square, THETA_SLACK};
pub use report::{ExperimentReport, ReportError};
