//! Command-line front end and benchmark harness for `hyperseries`.

pub mod commands;
pub mod memory;
pub mod report;
