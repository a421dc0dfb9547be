//! Command-line front end: TOML scenarios in, CSV tables (and optional SVG plots) out.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod svg;

use std::path::{Path, PathBuf};

pub use config::{load_config, parse_config, Product, Scenario};
pub use error::CliError;
pub use figures::{figure_report, figure_scenarios, run_figure};
pub use output::{format_float, write_tables, Table};
pub use run::{run_scenarios, scenario_report, Report};

/// Loads `config_path`, computes every scenario (restricted to `only` when given)
/// and writes the tables into `out_dir`.
pub fn run_scenario(
    config_path: &Path,
    out_dir: &Path,
    only: Option<Product>,
) -> Result<(Report, Vec<PathBuf>), CliError> {
    let scenarios = load_config(config_path)?;
    let report = run_scenarios(&scenarios, only, &config_path.display().to_string())?;
    let written = write_tables(&report.tables, out_dir)?;
    Ok((report, written))
}
