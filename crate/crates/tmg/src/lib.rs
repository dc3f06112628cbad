//! Command-line front end for `tmg-core`: JSON run configurations, sample
//! CSVs, run manifests, diagnostics reports and benchmarks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod clock;
pub mod config;
pub mod demo;
pub mod diagnose;
pub mod error;
pub mod io;
pub mod run;

pub use error::{CliError, CliResult};
