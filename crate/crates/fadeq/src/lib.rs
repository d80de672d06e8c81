//! Command-line front end for `fadeq-core`: config files, CSV output, run
//! manifests and a multi-threaded trial executor.

pub mod config;
pub mod exec;
pub mod manifest;
pub mod output;
pub mod run;

pub use fadeq_core as core;
