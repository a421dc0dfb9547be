//! Built-in scenarios for the seven reference figures.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use respole::{EnergyGrid, PoleSet};

use crate::config::{Product, Scenario};
use crate::error::CliError;
use crate::output::{write_atomic, write_tables, Table};
use crate::run::{scenario_report, Report};
use crate::svg::{render, Series};

pub const FIGURE_IDS: std::ops::RangeInclusive<u32> = 1..=7;

/// Narrow-state widths of the two-pole figures.
pub const FIG1_WIDTHS: [f64; 7] = [5.0, 1.0, 0.5, 0.1, 0.05, 0.025, 0.01];
pub const FIG4_WIDTHS: [f64; 3] = [0.05, 1.0, 5.0];
pub const FIG5_POSITIONS: [(f64, f64, f64); 3] = [(7.99, 8.01, 8.0), (7.9, 8.1, 8.0), (7.75, 8.25, 8.0)];

const NEAR_GRID: (f64, f64, usize) = (6.0, 10.0, 4001);
const WIDE_GRID: (f64, f64, usize) = (2.0, 12.0, 8001);

/// Scenarios whose outputs make up figure `id`.
pub fn figure_scenarios(id: u32) -> Result<Vec<Scenario>, CliError> {
    use Product::{Coupling, CrossSection, Phase};
    let scenarios = match id {
        1..=3 => FIG1_WIDTHS
            .iter()
            .map(|&g2| {
                let (outputs, states): (&[Product], Vec<usize>) = match id {
                    1 => (&[CrossSection], vec![0, 1]),
                    2 => (&[Coupling], vec![0]),
                    _ => (&[Coupling, Phase], vec![1]),
                };
                pole_scenario(
                    format!("fig{id}_g2_{g2}"),
                    &[(7.99, 0.05), (8.01, g2)],
                    NEAR_GRID,
                    outputs,
                    states,
                )
            })
            .collect::<Result<Vec<_>, _>>()?,
        4 => FIG4_WIDTHS
            .iter()
            .map(|&g3| {
                pole_scenario(
                    format!("fig4_g3_{g3}"),
                    &[(7.99, 0.05), (8.01, 0.05), (8.0, g3)],
                    NEAR_GRID,
                    &[CrossSection, Coupling],
                    vec![2],
                )
            })
            .collect::<Result<Vec<_>, _>>()?,
        5 => FIG5_POSITIONS
            .iter()
            .map(|&(e1, e2, e3)| {
                pole_scenario(
                    format!("fig5_e1_{e1}"),
                    &[(e1, 0.05), (e2, 0.05), (e3, 0.05)],
                    NEAR_GRID,
                    &[CrossSection, Coupling],
                    vec![2],
                )
            })
            .collect::<Result<Vec<_>, _>>()?,
        6 | 7 => {
            let g3 = if id == 6 { 3.0 } else { 3e-5 };
            vec![
                pole_scenario(
                    format!("fig{id}_single"),
                    &[(8.0, g3)],
                    WIDE_GRID,
                    &[CrossSection],
                    vec![0],
                )?,
                pole_scenario(
                    format!("fig{id}_triple"),
                    &[(4.0, 0.05), (10.0, 0.05), (8.0, g3)],
                    WIDE_GRID,
                    &[CrossSection, Coupling],
                    vec![0, 1, 2],
                )?,
            ]
        }
        other => return Err(CliError::InvalidFigure(other)),
    };
    Ok(scenarios)
}

fn pole_scenario(
    name: String,
    poles: &[(f64, f64)],
    (min, max, points): (f64, f64, usize),
    outputs: &[Product],
    coupling_states: Vec<usize>,
) -> Result<Scenario, CliError> {
    Ok(Scenario {
        name,
        outputs: outputs.iter().copied().collect::<BTreeSet<_>>(),
        poles: Some(PoleSet::from_pairs(poles)?),
        grid: Some(EnergyGrid::new(min, max, points)?),
        background_phase: 0.0,
        coupling_states,
        hamiltonian: None,
    })
}

/// Tables and notes for figure `id`, without touching the file system.
pub fn figure_report(id: u32) -> Result<Report, CliError> {
    let mut report = Report::default();
    for scenario in figure_scenarios(id)? {
        report.extend(scenario_report(&scenario, None)?);
    }
    Ok(report)
}

/// Writes the CSVs of figure `id` (and optionally an SVG) into `out_dir`.
pub fn run_figure(id: u32, out_dir: &Path, svg: bool) -> Result<(Report, Vec<PathBuf>), CliError> {
    let report = figure_report(id)?;
    let mut written = write_tables(&report.tables, out_dir)?;
    if svg {
        for (suffix, text) in figure_svgs(id, &report.tables) {
            let path = out_dir.join(format!("fig{id}{suffix}.svg"));
            write_atomic(&path, text.as_bytes())?;
            written.push(path);
        }
    }
    Ok((report, written))
}

/// Cross sections on linear axes, |W| on a log axis, unwrapped phases on linear axes.
fn figure_svgs(id: u32, tables: &[Table]) -> Vec<(&'static str, String)> {
    let series = |filter: &dyn Fn(&Table) -> bool, column: usize| -> Vec<Series> {
        tables
            .iter()
            .filter(|t| filter(t))
            .map(|t| Series {
                label: t.stem.clone(),
                points: t.rows.iter().map(|r| (r[0], r[column])).collect(),
            })
            .collect()
    };
    let is_sigma = |t: &Table| t.stem.ends_with("_sigma");
    let is_coupling = |t: &Table| t.stem.contains("_W") && !t.stem.contains("_jumps_");

    let mut plots = Vec::new();
    let sigma = series(&is_sigma, 1);
    if !sigma.is_empty() {
        plots.push((
            "_sigma",
            render(&format!("Figure {id}: cross section"), "E", "sigma", &sigma, false),
        ));
    }
    let magnitude = series(&is_coupling, 3);
    if !magnitude.is_empty() {
        plots.push((
            "_abs_W",
            render(&format!("Figure {id}: |W|"), "E", "|W|", &magnitude, true),
        ));
        let phase = series(&is_coupling, 4);
        plots.push((
            "_phase_W",
            render(&format!("Figure {id}: arg W"), "E", "phase (rad)", &phase, false),
        ));
    }
    plots
}
