//! Command-line front end for `foldtree`: tree enumeration, covers,
//! flow-tree solving, product tables, the Hecke comparison and SVG plots.
//!
//! Every JSON output embeds the tool version, the resolved configuration
//! and the seed, and is byte-identical across runs and worker counts.

pub mod commands;
pub mod config;
pub mod dto;
mod error;
pub mod plot;
pub mod run;

pub use error::CliError;
