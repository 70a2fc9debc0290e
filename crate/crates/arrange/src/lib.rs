//! File formats, the δ sweep driver, and reports for `arrange-core`.

pub mod csvio;
mod error;
pub mod report;
pub mod sweep;

pub use crate::error::{Error, Result};
pub use crate::report::{to_json, write_report, Format};
pub use crate::sweep::{run_sweep, run_sweep_with, SweepOptions, SweepReport};
