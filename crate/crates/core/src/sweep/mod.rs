//! One-dimensional time series and two-dimensional parameter grids, their
//! figure presets, and CSV / JSON / SVG serialization.
//!
//! Every numeric table the crate emits, sweeps or point queries alike, is a
//! [`GridResult`]: a list of cells laid out row-major over the grid axes,
//! each holding `time × columns` values and one convergence flag.

mod grid;
mod output;
mod presets;
mod run;
mod spec;

pub use grid::{CellFlag, FlagStatus, GridAxes, GridAxis, GridResult, SCHEMA};
pub use output::{file_name, serialize_result, write_result, OutputFormat};
pub use presets::{preset, PRESETS};
pub use run::{run_coherence_series, run_nm_grid, run_sweep, run_sweep_with_jobs};
pub use spec::{Axis, SweepMode, SweepSpec};
