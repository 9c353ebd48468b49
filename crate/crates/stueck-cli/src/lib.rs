//! Command-line front end: field evolutions with polar diagnostics,
//! guided-trajectory ensembles, oscillation sweeps, the closed-form mass
//! reconstruction, the relic-cloud size chain, and an end-to-end selftest.
//!
//! The binary (`stueck`) is a thin wrapper over these modules so integration
//! tests can drive the same code paths in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;
