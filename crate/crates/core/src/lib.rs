//! Analysis of business-process event logs.
//!
//! The crate takes a CSV event log, assembles one trace per customer case,
//! partitions the traces into outcome scenarios, elects the normal flow of
//! each scenario, classifies every deviating path into a set of control-flow
//! exception types, optionally splits exceptions into expected and unexpected
//! against a pre-defined process model, and tests how each kind of deviation
//! relates to throughput time with rank-based statistics.
//!
//! Modules map onto the stages of that pipeline:
//!
//! * [`log`] — parsing, trace assembly, variant mining
//! * [`scenario`] — outcome scenarios and normal-flow election
//! * [`conformance`] — directly-follows process models, expected vs. unexpected
//! * [`classify`] — repetition extraction, sequence alignment, exception types
//! * [`stats`] — rank statistics, Kruskal–Wallis, Dunn, special functions
//! * [`pipeline`] — grouping rules, per-scenario tests, hypothesis verdicts
//! * [`synth`] — deterministic synthetic log generator with injected ground truth
//! * [`report`] — end-to-end run orchestration and report rendering

pub mod classify;
pub mod conformance;
pub mod error;
pub mod log;
pub mod pipeline;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};

/// Concrete scalar used by the shipped pipeline, CLI and reports.
///
/// The statistical kernel in [`stats`] is generic over any
/// [`stats::Scalar`]; everything downstream of it instantiates this alias.
pub type Real = f64;

/// Crate version as compiled.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
