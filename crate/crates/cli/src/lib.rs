//! Command-line front end for the `tls-noise` pipelines.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod svg;
