//! File formats, parameter sweeps and the `dualrail` command-line harness
//! on top of [`dualrail_core`].

pub use dualrail_core as core;

pub mod amplitude;
pub mod circuit_file;
pub mod cli;
pub mod commands;
pub mod config;
pub mod dump;
mod error;
pub mod table;

pub use error::{AppError, AppResult};
