//! Command-line front end for `ehp-duffing`: example catalog, trajectory
//! files (CSV), run reports (JSON) and plots (SVG).

pub mod args;
pub mod commands;
pub mod error;
pub mod parallel;
pub mod svg;
pub mod trajectory_csv;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
