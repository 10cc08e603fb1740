//! Front end for `modesig`: CSV input, run configuration, the JSON report
//! and SVG figures.

pub mod config;
pub mod error;
pub mod input;
pub mod report;
pub mod run;
pub mod svg;

pub use config::{Command, GridRange, RunConfig};
pub use error::{CliError, Result};
pub use input::load_csv;
pub use report::Report;
pub use run::{emit_report, execute, run, Outcome};
