//! Turns validated scenarios into tables.

use respole::crossing::mixing_coefficients;
use respole::smatrix::cross_section_with_background;
use respole::{coupling_profile, phase_profile, sweep, trapping_scan, HamiltonianFamily, SweepTrajectory};

use crate::config::{CrossingSpec, Product, Scenario};
use crate::error::CliError;
use crate::output::{Table, COUPLING_HEADER, CROSSING_HEADER, JUMPS_HEADER, SIGMA_HEADER, TRAPPING_HEADER};

/// Tables plus human-readable summary lines.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn extend(&mut self, other: Report) {
        self.tables.extend(other.tables);
        self.notes.extend(other.notes);
    }
}

/// Computes the requested products of `scenario`, or only `only` when given.
pub fn scenario_report(scenario: &Scenario, only: Option<Product>) -> Result<Report, CliError> {
    let mut report = Report::default();
    for &product in &scenario.outputs {
        if only.is_some_and(|wanted| wanted != product) {
            continue;
        }
        match product {
            Product::CrossSection => report.tables.push(cross_section_table(scenario)?),
            Product::Coupling => report.tables.extend(coupling_tables(scenario)?),
            Product::Phase => report.extend(phase_report(scenario)?),
            Product::Trapping => report.extend(trapping_report(scenario)?),
            Product::Crossing => report.extend(crossing_report(scenario)?),
        }
    }
    Ok(report)
}

/// Runs every scenario; with `only`, at least one scenario must request that product.
pub fn run_scenarios(scenarios: &[Scenario], only: Option<Product>, origin: &str) -> Result<Report, CliError> {
    if let Some(product) = only {
        if !scenarios.iter().any(|s| s.outputs.contains(&product)) {
            return Err(CliError::Config {
                path: origin.to_owned(),
                message: format!("no scenario requests the `{}` output", product_name(product)),
            });
        }
    }
    let mut report = Report::default();
    for scenario in scenarios {
        report.extend(scenario_report(scenario, only)?);
    }
    Ok(report)
}

pub fn product_name(product: Product) -> &'static str {
    match product {
        Product::CrossSection => "cross_section",
        Product::Coupling => "coupling",
        Product::Phase => "phase",
        Product::Trapping => "trapping",
        Product::Crossing => "crossing",
    }
}

fn pole_inputs(scenario: &Scenario) -> (&respole::PoleSet, &respole::EnergyGrid) {
    match (&scenario.poles, &scenario.grid) {
        (Some(poles), Some(grid)) => (poles, grid),
        _ => unreachable!("validated scenarios carry poles and grid for pole products"),
    }
}

fn cross_section_table(scenario: &Scenario) -> Result<Table, CliError> {
    let (poles, grid) = pole_inputs(scenario);
    let rows = cross_section_with_background(poles, grid, scenario.background_phase)
        .into_iter()
        .map(|(e, sigma)| vec![e, sigma])
        .collect();
    Ok(Table {
        stem: format!("{}_sigma", scenario.name),
        header: SIGMA_HEADER,
        rows,
    })
}

fn coupling_tables(scenario: &Scenario) -> Result<Vec<Table>, CliError> {
    let (poles, grid) = pole_inputs(scenario);
    scenario
        .coupling_states
        .iter()
        .map(|&n| {
            let profile = coupling_profile(poles, n, grid)?;
            let phase = phase_profile(&profile)?;
            let rows = profile
                .samples
                .iter()
                .zip(&phase.unwrapped_phase)
                .map(|(&(e, w), &p)| vec![e, w.re, w.im, w.norm(), p])
                .collect();
            Ok(Table {
                stem: format!("{}_W{}", scenario.name, n + 1),
                header: COUPLING_HEADER,
                rows,
            })
        })
        .collect()
}

fn phase_report(scenario: &Scenario) -> Result<Report, CliError> {
    let (poles, grid) = pole_inputs(scenario);
    let mut report = Report::default();
    for &n in &scenario.coupling_states {
        let phase = phase_profile(&coupling_profile(poles, n, grid)?)?;
        report.notes.push(format!(
            "{} W{}: total phase change {} rad, {} jump(s)",
            scenario.name,
            n + 1,
            phase.total_change(),
            phase.jumps.len()
        ));
        report.tables.push(Table {
            stem: format!("{}_jumps_W{}", scenario.name, n + 1),
            header: JUMPS_HEADER,
            rows: phase.jumps.iter().map(|j| vec![j.energy, j.magnitude]).collect(),
        });
    }
    Ok(report)
}

fn trapping_report(scenario: &Scenario) -> Result<Report, CliError> {
    let spec = scenario.hamiltonian.as_ref().expect("validated");
    let alphas = spec.trapping.as_ref().expect("validated");
    let base = spec.family.base();
    let scan = trapping_scan(base.h0(), base.couplings(), alphas)?;
    let trajectory = &scan.trajectory;

    let mut rows = Vec::with_capacity(trajectory.len() * trajectory.states());
    for s in 0..trajectory.len() {
        for k in 0..trajectory.states() {
            let lambda = trajectory.eigenvalue_paths[k][s];
            rows.push(vec![
                trajectory.parameter_samples[s],
                (k + 1) as f64,
                lambda.re,
                width(lambda),
                trajectory.a_norm(k, s),
            ]);
        }
    }
    let last = scan.partitions.last().expect("at least two alpha samples");
    Ok(Report {
        tables: vec![Table {
            stem: format!("{}_trapping", scenario.name),
            header: TRAPPING_HEADER,
            rows,
        }],
        notes: vec![format!(
            "{}: at alpha = {} the {} narrowest state(s) carry a width fraction of {}",
            scenario.name,
            last.alpha,
            trajectory.states() - base.channels(),
            last.trapped_fraction
        )],
    })
}

fn crossing_report(scenario: &Scenario) -> Result<Report, CliError> {
    let spec = scenario.hamiltonian.as_ref().expect("validated");
    let CrossingSpec { grid, states: (k, l) } = spec.crossing.as_ref().expect("validated");
    let trajectory = sweep(&spec.family as &dyn HamiltonianFamily, grid)?;
    let forward = mixing_coefficients(&trajectory, *k, *l)?;
    let backward = mixing_coefficients(&trajectory, *l, *k)?;

    let mut rows = Vec::with_capacity(2 * trajectory.len());
    for s in 0..trajectory.len() {
        for (state, beta, theta) in [
            (*k, forward.beta[s].0.norm(), forward.theta[s]),
            (*l, backward.beta[s].0.norm(), backward.theta[s]),
        ] {
            let lambda = trajectory.eigenvalue_paths[state][s];
            rows.push(vec![
                trajectory.parameter_samples[s],
                (state + 1) as f64,
                lambda.re,
                width(lambda),
                beta,
                theta,
            ]);
        }
    }
    Ok(Report {
        tables: vec![Table {
            stem: format!("{}_crossing", scenario.name),
            header: CROSSING_HEADER,
            rows,
        }],
        notes: critical_notes(&scenario.name, &trajectory),
    })
}

fn critical_notes(name: &str, trajectory: &SweepTrajectory) -> Vec<String> {
    if trajectory.critical_points.is_empty() {
        return vec![format!("{name}: no critical point inside the sweep")];
    }
    trajectory
        .critical_points
        .iter()
        .map(|p| {
            format!(
                "{name}: {} of states {} and {} at a = {} (distance {})",
                p.kind.as_str(),
                p.states.0 + 1,
                p.states.1 + 1,
                p.parameter,
                p.distance
            )
        })
        .collect()
}

/// `Γ = −2 Im E`, with a lossless state reported as `+0`.
fn width(lambda: respole::Complex64) -> f64 {
    0.0 - 2.0 * lambda.im
}
