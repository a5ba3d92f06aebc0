//! Configuration, file formats and the command layer behind the `pgg` CLI.

pub mod commands;
pub mod config;
pub mod csv;
pub mod svg;

pub use commands::{execute, Command, CommandError, Report};
pub use config::{load_config, ConfigError, DensitySource, ModeKind, RunConfig, SweepAxes, SweepKind};
pub use svg::{plot_simplex, render_simplex};
