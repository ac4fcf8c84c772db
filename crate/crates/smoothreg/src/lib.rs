//! Experiment runner for smoothing regularization of weakly singular
//! central forces: configuration, CSV and JSON reports, and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;
