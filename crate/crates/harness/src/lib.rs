//! Command-line harness: config files, record output, sweeps and the
//! verification suites.

pub mod cli;
pub mod config;
pub mod error;
pub mod records;
pub mod verify;

pub use error::HarnessError;
