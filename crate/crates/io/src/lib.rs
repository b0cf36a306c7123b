//! File formats and the command-line front end for `qrange-core`.

pub mod cli;
pub mod io;

pub use qrange_core as core;
