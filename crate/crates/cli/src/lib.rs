//! Campaign orchestration for morphsynth: configuration files, the
//! optimization loop, artifact writing and SVG reports.

pub mod artifacts;
pub mod campaign;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

pub use error::{CliError, Result};
