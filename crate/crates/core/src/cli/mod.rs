//! Command-line front end: presets, grids, sweep orchestration and output.

pub mod grid;
pub mod presets;
mod run;
pub mod serialize;

pub use run::{config_json, exit, run, OUTPUT_DIR_ENV};
