//! Scenario runner, SVG rendering and table output for piecewise rotations.

pub mod input;
pub mod render;
pub mod scenario;
pub mod tables;

pub use input::{InputError, MapSpec, Window};
pub use render::{render_svg, Labelled};
pub use scenario::{run, run_scenario, Report, RunOptions, Scenario};
pub use tables::{emit_tables, float_coding};
