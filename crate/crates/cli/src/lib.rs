//! Command-line front end for `repeater-core`: config files, named
//! presets, multi-threaded sweeps and CSV / JSON-lines output.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod parallel;
pub mod presets;
pub mod verify;

pub use cli::run;
pub use error::CliError;
