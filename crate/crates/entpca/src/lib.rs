//! File formats, benchmark harness and command line around `entpca-core`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use error::{Error, Result};
